#include <iostream>

#include "cspace/cli/cli.hpp"

int main(int argc, char** argv) {
    return cspace::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
