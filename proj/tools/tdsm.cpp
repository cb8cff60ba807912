#include <iostream>

#include "tdsm/commands.hpp"

int main(int argc, char** argv) { return tdsm::run_cli(argc, argv, std::cout, std::cerr); }
