#include <iostream>

#include "cisim/cli/commands.hpp"

int main(int argc, char** argv) { return cisim::run_cli(argc, argv, std::cout, std::cerr); }
