#include <iostream>

#include "fissile/cli.hpp"

int main(int argc, char** argv) { return fissile::cli::run(argc, argv, std::cout, std::cerr); }
