// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file output.hpp
 * @brief CSV tables, matrices and the basis legend.
 */

#pragma once

#include "nfk/fock.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nfk::cli {

/// Shortest decimal form that reads back to the same double.
std::string fmt(double x);

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_table(const std::filesystem::path& dir, const Table& t);

/// Real matrix with a header of column basis indices.
Table matrix_table(const std::string& name, const RMat& m);

/// Appends `<name>_re` and `<name>_im`.
void add_complex_matrix(std::vector<Table>& out, const std::string& name, const CMat& m);

/// index, total, and one occupation column per mode.
Table basis_legend(const FockBasis& b);

}  // namespace nfk::cli
