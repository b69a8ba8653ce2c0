// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skingen/dataprep.hpp"

namespace skingen::cli {

// Subcommands: prep, ingest, eval, fusion-compare, study report, serve.
// Global flags: --config <service.json>, --seed <n>, --out <path>.
// Exit status: 0 success, 1 runtime failure (one line on `err`), 2 usage.
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Stand-in corpora used when no --index is given. f17k: the 114 built-in
// labels with 52-653 images each; scin: generic labels, multi-condition.
std::vector<DatasetRecord> default_synthetic_corpus(DatasetTag dataset, std::uint64_t seed);

}  // namespace skingen::cli
