#include <iostream>
#include <string>
#include <vector>

#include "entrokit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return entrokit::cli::dispatch(args, std::cout, std::cerr);
}
