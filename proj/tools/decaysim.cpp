// decaysim.cpp — Command-line entry point

#include "decaysim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return decaysim::cli::run(argc, argv, std::cout, std::cerr); }
