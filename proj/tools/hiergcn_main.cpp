#include "hiergcn/cli.hpp"

int main(int argc, char** argv) { return hiergcn::run_cli(argc, argv); }
