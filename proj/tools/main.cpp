#include <iostream>

#include "forge_cli/commands.hpp"

int main(int argc, char** argv) { return forge_cli::dispatch(argc, argv, std::cout, std::cerr); }
