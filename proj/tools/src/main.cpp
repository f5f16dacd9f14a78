#include <iostream>

#include "kgenrich/cli.hpp"

int main(int argc, char** argv) { return kgenrich::run_cli(argc, argv, std::cout, std::cerr); }
