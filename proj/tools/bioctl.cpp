#include <iostream>
#include <string>
#include <vector>

#include "bioctl/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return bioctl::run_cli(args, std::cout, std::cerr);
}
