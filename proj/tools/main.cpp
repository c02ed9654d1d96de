#include <iostream>

#include "fastrates/cli.hpp"

int main(int argc, char** argv) {
    return fastrates::run_cli(argc, argv, std::cout, std::cerr);
}
