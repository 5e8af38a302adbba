#include <iostream>

#include "specvec/cli.hpp"

int main(int argc, char** argv) { return specvec::run_cli(argc, argv, std::cout, std::cerr); }
