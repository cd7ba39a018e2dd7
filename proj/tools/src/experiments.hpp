// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file experiments.hpp
 * @brief One runner per subcommand.
 */

#pragma once

#include "config.hpp"
#include "output.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfk::cli {

struct RunContext {
  std::uint64_t seed = 1;
  int workers = 1;
};

struct RunOutput {
  json result;
  std::vector<Table> tables;
  bool pass = true;
};

const std::vector<std::string>& variants();

/// Parameter schema and the statement the variant checks; throws ConfigError
/// for unknown variants.
std::string describe(const std::string& variant);

/// Reads and validates every parameter before any computation.
RunOutput run_experiment(const std::string& variant, const ModelSpec& spec, Params& params,
                         const RunContext& ctx);

}  // namespace nfk::cli
