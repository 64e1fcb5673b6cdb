#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hiergcn/rng.hpp"
#include "hiergcn/types.hpp"

namespace hiergcn {

// One parsed input line: `user item [rating] [timestamp]`. Rating and
// timestamp are kept only long enough to apply the binarization threshold.
struct RawRecord {
  std::string user_key;
  std::string item_key;
  std::optional<double> weight;
  std::optional<long long> timestamp;
};

struct IngestOptions {
  // Keep a record iff it has no weight field or weight > min_weight.
  double min_weight = 0.0;
};

// Parses a line-oriented interaction stream. Fields are separated by tabs or
// runs of spaces; lines starting with '#' and blank lines are skipped.
// Duplicate (user, item) lines collapse to the first occurrence.
// Throws DataError on a malformed line (with its line number) or empty input.
std::vector<RawRecord> ingest(std::istream& in, const IngestOptions& opts = {});
std::vector<RawRecord> ingest_file(const std::string& path, const IngestOptions& opts = {});

struct SplitConfig {
  double split_ratio = 0.8;
  std::uint64_t seed = 42;
  bool per_user = true;  // split each user's pairs independently
};

// Implicit-feedback interactions with dense internal ids and a train/test
// partition. Users get ids [0, num_users), items [0, num_items).
struct InteractionSet {
  int num_users = 0;
  int num_items = 0;
  std::vector<std::pair<int, int>> train_pairs;  // sorted (user, item)
  std::vector<std::pair<int, int>> test_pairs;   // sorted (user, item)
  std::vector<std::vector<int>> user_train_index;  // per user, sorted items
  std::vector<std::vector<int>> user_test_index;   // per user, sorted items
  std::vector<std::string> user_keys;  // internal id -> original key
  std::vector<std::string> item_keys;
  // Users with >= 1 train item and >= 1 non-train item; cached for sampling.
  std::vector<int> sampling_users;

  bool in_train(int user, int item) const;
  bool in_test(int user, int item) const;
};

// Deterministic split for a fixed (records, cfg.seed). Every user with >= 2
// interactions keeps at least one pair on each side; single-interaction users
// go entirely to train. Throws DataError on empty input.
InteractionSet build_split(const std::vector<RawRecord>& records, const SplitConfig& cfg);

// Assembles a set directly from internal-id pairs (tests, synthetic data).
// Validates ranges and train/test disjointness.
InteractionSet make_set(int num_users, int num_items,
                        std::vector<std::pair<int, int>> train,
                        std::vector<std::pair<int, int>> test);

struct Triplet {
  int user;
  int pos_item;
  int neg_item;
};

// BPR triplet: u uniform over users with >= 1 train item (and at least one
// non-train item left), i uniform over u's train items, j uniform over items
// outside u's train set. Test items may be drawn as negatives. Throws
// DataError when every eligible user's train set covers all items.
Triplet sample_triplet(const InteractionSet& set, Rng& rng);

// Two-column `user<TAB>item` file with internal ids, rows sorted.
void write_pairs_tsv(const std::string& path, const std::vector<std::pair<int, int>>& pairs);

// `internal_id<TAB>original_key<TAB>{user|item}`, users first.
void write_idmap_tsv(const std::string& path, const InteractionSet& set);

// Loads a train file and optional test file through ingest + key union
// (train keys first, then new test keys). Records in the test file become
// test_pairs verbatim; no re-splitting happens.
InteractionSet load_split(const std::string& train_path, const std::string& test_path = "",
                          const IngestOptions& opts = {});

}  // namespace hiergcn
