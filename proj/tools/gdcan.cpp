#include <iostream>

#include "gdcan/commands.hpp"

int main(int argc, char** argv) {
    return gdcan::cli::run(argc, argv, std::cout, std::cerr);
}
