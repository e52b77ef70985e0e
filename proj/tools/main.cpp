#include <iostream>

#include "venation/cli.hpp"

int main(int argc, char** argv) { return venation::cli::main(argc, argv, std::cout, std::cerr); }
