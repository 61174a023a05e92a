// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "mapo/cli.hpp"

int main(int argc, char** argv) { return mapo::run_cli(argc, argv, std::cout, std::cerr); }
