#include <iostream>

#include "fracevo/cli.hpp"

int main(int argc, char** argv) { return fracevo::cli::run(argc, argv, std::cout, std::cerr); }
