#include <iostream>

#include "bifurcate_cli/commands.hpp"

int main(int argc, char** argv) { return bifurcate::cli::main_entry(argc, argv, std::cout, std::cerr); }
