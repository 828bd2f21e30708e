// SPDX-License-Identifier: Apache-2.0
#include "auric/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return auric::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
