#include "perm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return perm::run_cli(argc, argv, std::cout, std::cerr); }
