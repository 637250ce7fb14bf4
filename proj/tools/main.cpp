#include <iostream>

#include "numgame/cli.hpp"

int main(int argc, char** argv) {
    return numgame::cli::run(argc, argv, std::cout, std::cerr);
}
