#include <iostream>

#include "sbinterp/cli.hpp"

int main(int argc, char** argv) { return sbi::cli::run(argc, argv, std::cout, std::cerr); }
