// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Strict reader for the "params" block of a run configuration.
 *
 * Every accessor records the key it consumed; finish() rejects anything
 * left over. Errors carry the dotted field path.
 */

#pragma once

#include "nfk/fock.hpp"
#include "nfk/model.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfk::cli {

using nlohmann::json;

/// Schema violation; maps to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Params {
 public:
  Params(const json& j, std::string path);

  const std::string& path() const { return path_; }
  bool has(const char* key) const;

  double number(const char* key, std::optional<double> def = std::nullopt);
  int integer(const char* key, std::optional<int> def = std::nullopt);
  std::size_t count(const char* key, std::optional<std::size_t> def = std::nullopt);
  bool boolean(const char* key, std::optional<bool> def = std::nullopt);
  std::string string(const char* key, std::optional<std::string> def = std::nullopt);

  /// A d-vector; a bare number is accepted when d == 1.
  RVec vector(const char* key, int d, std::optional<RVec> def = std::nullopt);
  std::vector<double> numbers(const char* key,
                              std::optional<std::vector<double>> def = std::nullopt);
  std::vector<int> integers(const char* key,
                            std::optional<std::vector<int>> def = std::nullopt);
  std::vector<RVec> vectors(const char* key, int d,
                            std::optional<std::vector<RVec>> def = std::nullopt);

  /// Raw access for nested values; the key counts as consumed.
  const json* raw(const char* key);
  std::string field(const char* key) const { return path_ + "." + key; }

  void finish() const;

 private:
  const json* take(const char* key);

  json j_;
  std::string path_;
  std::set<std::string> used_;
};

RVec to_vector(const json& j, int d, const std::string& path);

/// "nelson" or {"variant": "modulated", "a": .., "w": .., "b": ..}.
TimeProfile read_profile(Params& p, const Model& model);

}  // namespace nfk::cli
