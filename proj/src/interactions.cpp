#include "hiergcn/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hiergcn/format.hpp"

namespace hiergcn {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(const std::string& s, long long line_no) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw DataError("line " + std::to_string(line_no) + ": bad numeric field '" + s + "'");
    return v;
}

long long parse_ll(const std::string& s, long long line_no) {
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty())
        throw DataError("line " + std::to_string(line_no) + ": bad integer field '" + s + "'");
    return v;
}

void finish_set(InteractionSet& set) {
    std::sort(set.train_pairs.begin(), set.train_pairs.end());
    std::sort(set.test_pairs.begin(), set.test_pairs.end());
    set.user_train_index.assign(set.num_users, {});
    set.user_test_index.assign(set.num_users, {});
    for (const auto& [u, i] : set.train_pairs) set.user_train_index[u].push_back(i);
    for (const auto& [u, i] : set.test_pairs) set.user_test_index[u].push_back(i);
    for (auto& v : set.user_train_index) std::sort(v.begin(), v.end());
    for (auto& v : set.user_test_index) std::sort(v.begin(), v.end());
    set.sampling_users.clear();
    for (int u = 0; u < set.num_users; ++u) {
        std::size_t n = set.user_train_index[u].size();
        if (n >= 1 && n < static_cast<std::size_t>(set.num_items))
            set.sampling_users.push_back(u);
    }
}

// Builds the id maps over records in first-occurrence order.
struct KeyTable {
    std::unordered_map<std::string, int> ids;
    std::vector<std::string> keys;

    int intern(const std::string& key) {
        auto [it, fresh] = ids.emplace(key, static_cast<int>(keys.size()));
        if (fresh) keys.push_back(key);
        return it->second;
    }
};

}  // namespace

bool InteractionSet::in_train(int user, int item) const {
    const auto& v = user_train_index[user];
    return std::binary_search(v.begin(), v.end(), item);
}

bool InteractionSet::in_test(int user, int item) const {
    const auto& v = user_test_index[user];
    return std::binary_search(v.begin(), v.end(), item);
}

std::vector<RawRecord> ingest(std::istream& in, const IngestOptions& opts) {
    std::vector<RawRecord> records;
    std::unordered_set<std::string> seen;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) continue;  // whitespace-only line
        if (fields.size() < 2 || fields.size() > 4)
            throw DataError("line " + std::to_string(line_no) + ": expected 2-4 fields, got " +
                            std::to_string(fields.size()));
        RawRecord rec;
        rec.user_key = fields[0];
        rec.item_key = fields[1];
        if (fields.size() >= 3) rec.weight = parse_double(fields[2], line_no);
        if (fields.size() == 4) rec.timestamp = parse_ll(fields[3], line_no);
        if (rec.weight && !(*rec.weight > opts.min_weight)) continue;
        std::string key = rec.user_key + '\x1f' + rec.item_key;
        if (!seen.insert(std::move(key)).second) continue;
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError("no interactions in input");
    return records;
}

std::vector<RawRecord> ingest_file(const std::string& path, const IngestOptions& opts) {
    auto f = open_in(path);
    return ingest(f, opts);
}

InteractionSet build_split(const std::vector<RawRecord>& records, const SplitConfig& cfg) {
    if (records.empty()) throw DataError("cannot split zero interactions");
    if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0))
        throw DataError("split_ratio must be in (0, 1), got " + fmt_double(cfg.split_ratio));

    KeyTable users, items;
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(records.size());
    for (const auto& rec : records)
        pairs.emplace_back(users.intern(rec.user_key), items.intern(rec.item_key));

    InteractionSet set;
    set.num_users = static_cast<int>(users.keys.size());
    set.num_items = static_cast<int>(items.keys.size());
    set.user_keys = std::move(users.keys);
    set.item_keys = std::move(items.keys);

    Rng rng(cfg.seed);
    if (cfg.per_user) {
        std::vector<std::vector<int>> per_user(set.num_users);
        for (const auto& [u, i] : pairs) per_user[u].push_back(i);
        for (int u = 0; u < set.num_users; ++u) {
            auto& v = per_user[u];
            auto n = static_cast<long long>(v.size());
            if (n == 1) {
                set.train_pairs.emplace_back(u, v[0]);
                continue;
            }
            for (long long i = n - 1; i >= 1; --i) {
                auto j = static_cast<long long>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
                std::swap(v[i], v[j]);
            }
            long long n_train = std::llround(cfg.split_ratio * static_cast<double>(n));
            n_train = std::clamp<long long>(n_train, 1, n - 1);
            for (long long i = 0; i < n; ++i)
                (i < n_train ? set.train_pairs : set.test_pairs).emplace_back(u, v[i]);
        }
    } else {
        auto n = static_cast<long long>(pairs.size());
        for (long long i = n - 1; i >= 1; --i) {
            auto j = static_cast<long long>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
            std::swap(pairs[i], pairs[j]);
        }
        long long n_train = std::clamp<long long>(
            std::llround(cfg.split_ratio * static_cast<double>(n)), 1, std::max<long long>(1, n - 1));
        for (long long i = 0; i < n; ++i)
            (i < n_train ? set.train_pairs : set.test_pairs).push_back(pairs[i]);
    }
    finish_set(set);
    return set;
}

InteractionSet make_set(int num_users, int num_items, std::vector<std::pair<int, int>> train,
                        std::vector<std::pair<int, int>> test) {
    if (num_users <= 0 || num_items <= 0)
        throw DataError("make_set needs positive user and item counts");
    InteractionSet set;
    set.num_users = num_users;
    set.num_items = num_items;
    set.train_pairs = std::move(train);
    set.test_pairs = std::move(test);
    for (const auto* pairs : {&set.train_pairs, &set.test_pairs})
        for (const auto& [u, i] : *pairs)
            if (u < 0 || u >= num_users || i < 0 || i >= num_items)
                throw DataError("pair (" + std::to_string(u) + ", " + std::to_string(i) +
                                ") out of range");
    std::vector<std::pair<int, int>> all;
    all.reserve(set.train_pairs.size() + set.test_pairs.size());
    all.insert(all.end(), set.train_pairs.begin(), set.train_pairs.end());
    all.insert(all.end(), set.test_pairs.begin(), set.test_pairs.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw DataError("duplicate (user, item) pair across train/test");
    set.user_keys.reserve(num_users);
    set.item_keys.reserve(num_items);
    for (int u = 0; u < num_users; ++u) set.user_keys.push_back("u" + std::to_string(u));
    for (int i = 0; i < num_items; ++i) set.item_keys.push_back("i" + std::to_string(i));
    finish_set(set);
    return set;
}

Triplet sample_triplet(const InteractionSet& set, Rng& rng) {
    const std::vector<int>* eligible = &set.sampling_users;
    std::vector<int> scratch;
    if (eligible->empty()) {
        for (int u = 0; u < set.num_users; ++u) {
            std::size_t n = set.user_train_index[u].size();
            if (n >= 1 && n < static_cast<std::size_t>(set.num_items)) scratch.push_back(u);
        }
        eligible = &scratch;
    }
    if (eligible->empty())
        throw DataError("no user admits a negative item; cannot sample triplets");
    int u = (*eligible)[rng.uniform_int(eligible->size())];
    const auto& pos = set.user_train_index[u];
    int i = pos[rng.uniform_int(pos.size())];
    int j;
    do {
        j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(set.num_items)));
    } while (set.in_train(u, j));
    return {u, i, j};
}

void write_pairs_tsv(const std::string& path, const std::vector<std::pair<int, int>>& pairs) {
    auto f = open_out(path);
    for (const auto& [u, i] : pairs) f << u << '\t' << i << '\n';
    if (!f) throw DataError("write failed: " + path);
}

void write_idmap_tsv(const std::string& path, const InteractionSet& set) {
    auto f = open_out(path);
    for (int u = 0; u < set.num_users; ++u) f << u << '\t' << set.user_keys[u] << "\tuser\n";
    for (int i = 0; i < set.num_items; ++i) f << i << '\t' << set.item_keys[i] << "\titem\n";
    if (!f) throw DataError("write failed: " + path);
}

InteractionSet load_split(const std::string& train_path, const std::string& test_path,
                          const IngestOptions& opts) {
    auto train_recs = ingest_file(train_path, opts);
    std::vector<RawRecord> test_recs;
    if (!test_path.empty()) test_recs = ingest_file(test_path, opts);

    KeyTable users, items;
    std::vector<std::pair<int, int>> train, test;
    for (const auto& rec : train_recs)
        train.emplace_back(users.intern(rec.user_key), items.intern(rec.item_key));
    for (const auto& rec : test_recs)
        test.emplace_back(users.intern(rec.user_key), items.intern(rec.item_key));

    InteractionSet set;
    set.num_users = static_cast<int>(users.keys.size());
    set.num_items = static_cast<int>(items.keys.size());
    set.user_keys = std::move(users.keys);
    set.item_keys = std::move(items.keys);
    set.train_pairs = std::move(train);
    set.test_pairs = std::move(test);
    std::vector<std::pair<int, int>> all;
    all.reserve(set.train_pairs.size() + set.test_pairs.size());
    all.insert(all.end(), set.train_pairs.begin(), set.train_pairs.end());
    all.insert(all.end(), set.test_pairs.begin(), set.test_pairs.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw DataError("pair appears in both train and test input");
    finish_set(set);
    return set;
}

}  // namespace hiergcn
