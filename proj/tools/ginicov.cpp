#include <iostream>

#include "ginibre/cli.hpp"

int main(int argc, char** argv) { return ginibre::cli::run(argc, argv, std::cout, std::cerr); }
