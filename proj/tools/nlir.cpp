#include <iostream>
#include <string>
#include <vector>

#include "nlir/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return nlir::cli::run(args, std::cout, std::cerr);
}
