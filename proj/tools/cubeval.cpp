#include <iostream>

#include "cubeval/cli.hpp"

int main(int argc, char** argv) { return cubeval::cli::run(argc, argv, std::cout, std::cerr); }
