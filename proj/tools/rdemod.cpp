#include <iostream>

#include "rdemod/cli.hpp"

int main(int argc, char** argv) { return rdemod::cli::run(argc, argv, std::cout, std::cerr); }
