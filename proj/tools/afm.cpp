#include "afm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return afm::cli::run(argc, argv, std::cout, std::cerr);
}
