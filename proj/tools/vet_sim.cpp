#include <iostream>

#include "vetsim/cli.hpp"

int main(int argc, char** argv) { return vetsim::run_cli(argc, argv, std::cout, std::cerr); }
