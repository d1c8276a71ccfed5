#include <iostream>

#include "threshnet/cli.hpp"

int main(int argc, char** argv) { return threshnet::cli::run(argc, argv, std::cout, std::cerr); }
