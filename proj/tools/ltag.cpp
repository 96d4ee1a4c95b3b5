#include <iostream>

#include "ltag/cli.hpp"

int main(int argc, char** argv) { return ltag::cli::run(argc, argv, std::cout, std::cerr); }
