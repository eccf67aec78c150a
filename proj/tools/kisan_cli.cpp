#include <kisan/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return kisan::run_cli(argc, argv, std::cout, std::cerr); }
