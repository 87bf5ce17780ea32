#include "cli.hpp"

int main(int argc, char** argv) { return graphscan::cli::run_cli(argc, argv); }
