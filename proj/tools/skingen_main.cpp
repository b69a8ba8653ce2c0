// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "skingen/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return skingen::cli::run(args, std::cout, std::cerr);
}
