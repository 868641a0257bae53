// The `itml` command-line tool.

#include <iostream>

#include "itml/cli.hpp"

int main(int argc, char** argv) { return itml::cli::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
