#include <iostream>
#include <string>
#include <vector>

#include "whistle/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return whistle::cli::run(args, std::cout, std::cerr);
}
