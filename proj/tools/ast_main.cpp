#include <iostream>

#include "ast/cli.hpp"

int main(int argc, char** argv) { return ast::cli::run(argc, argv, std::cout, std::cerr); }
