#include "tvcm/cli.hpp"

int main(int argc, char** argv) { return tvcm::run_subcommand(argc, argv); }
