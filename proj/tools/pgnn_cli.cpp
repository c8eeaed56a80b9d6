#include <iostream>

#include "pgnn/eval/cli.hpp"

int main(int argc, char** argv) { return pgnn::eval::cli_main(argc, argv, std::cout, std::cerr); }
