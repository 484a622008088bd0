#include <iostream>

#include "nehs/cli.hpp"

int main(int argc, char** argv) { return nehs::cli::run(argc, argv, std::cout, std::cerr); }
