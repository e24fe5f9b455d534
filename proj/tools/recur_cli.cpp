#include <string>
#include <vector>

#include "recur/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return recur::run_cli(args);
}
