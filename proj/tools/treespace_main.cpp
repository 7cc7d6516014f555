#include <iostream>

#include "treespace/cli.hpp"

int main(int argc, char** argv) {
    return treespace::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
