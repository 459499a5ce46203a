#include "wdvv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return wdvv::cli::run(argc, argv, std::cout, std::cerr); }
