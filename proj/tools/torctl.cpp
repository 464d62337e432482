#include "tor/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return tor::run_cli(argc, argv, std::cout, std::cerr); }
