#include <string>
#include <vector>

#include "csvortex/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return csvortex::cli_main(args);
}
