// SPDX-License-Identifier: MIT
#include "ilab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ilab::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
