#pragma once

namespace hiergcn {

// Full pipeline entry point: split | train | eval | sweep | attack | analyze.
// Every run writes a manifest.txt with the effective parameters and seeds
// into its --out directory and never writes outside it.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace hiergcn
