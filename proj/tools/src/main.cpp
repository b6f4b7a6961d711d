#include <iostream>

#include "replab/cli.hpp"

int main(int argc, char** argv) { return replab::cli::run(argc, argv, std::cout, std::cerr); }
