#include <iostream>

#include "birgn/cli/commands.hpp"

int main(int argc, char** argv) { return birgn::cli::main_entry(argc, argv, std::cout, std::cerr); }
