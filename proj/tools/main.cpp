#include <iostream>

#include "twoel/cli.hpp"

int main(int argc, char** argv) { return twoel::runCli(argc, argv, std::cout, std::cerr); }
