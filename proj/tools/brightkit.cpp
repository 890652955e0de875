// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "brightkit/cli.hpp"

int main(int argc, char** argv) { return brightkit::cli::run(argc, argv); }
