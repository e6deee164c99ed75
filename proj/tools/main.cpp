#include <iostream>

#include "fanclose/cli.hpp"

int main(int argc, char** argv) { return fc::run_cli(argc, argv, std::cout, std::cerr); }
