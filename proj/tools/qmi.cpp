#include <iostream>

#include "qmi/cli.hpp"

int main(int argc, char** argv) { return qmi::cli::main_entry(argc, argv, std::cout, std::cerr); }
