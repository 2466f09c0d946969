#include <iostream>

#include "letf/cli.hpp"

int main(int argc, char** argv) { return letf::cli::run_main(argc, argv, std::cerr); }
