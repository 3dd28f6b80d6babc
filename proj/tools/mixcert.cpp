#include <iostream>

#include "mixcert/cli.hpp"

int main(int argc, char** argv) { return mixcert::cli::run(argc, argv, std::cout, std::cerr); }
