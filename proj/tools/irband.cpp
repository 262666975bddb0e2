#include <iostream>

#include "irband/cli.hpp"

int main(int argc, char** argv) { return irband::cli::run(argc, argv, std::cout, std::cerr); }
