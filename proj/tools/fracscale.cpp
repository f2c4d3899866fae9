#include <iostream>
#include <string>
#include <vector>

#include "fracscale/cli.hpp"

int main(int argc, char** argv) {
    return fracscale::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
