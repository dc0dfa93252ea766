#include <iostream>
#include <string>
#include <vector>

#include "skylink/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return skylink::cli::run(args, std::cout, std::cerr);
}
