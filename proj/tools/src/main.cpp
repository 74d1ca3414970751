#include "hierprox_cli/commands.hpp"

int main(int argc, char** argv) { return hierprox::cli::run_cli(argc, argv); }
