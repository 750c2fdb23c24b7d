#include <iostream>

#include "expopt/cli.hpp"

int main(int argc, char** argv) { return expopt::cli::run(argc, argv, std::cout, std::cerr); }
