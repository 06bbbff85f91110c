#include <iostream>

#include "lowreg/cli.hpp"

int main(int argc, char** argv) { return lowreg::run_cli(argc, argv, std::cout, std::cerr); }
