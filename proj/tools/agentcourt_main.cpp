#include <vector>

#include "agentcourt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return agentcourt::cli_run(args);
}
