#include <vector>

#include "thinmem/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return thinmem::run_cli(args);
}
