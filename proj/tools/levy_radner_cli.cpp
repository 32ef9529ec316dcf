#include <iostream>

#include "levy_radner/cli.hpp"

int main(int argc, char** argv) { return levy_radner::run_cli(argc, argv, std::cout, std::cerr); }
