// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "output.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace nfk::cli {

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_table(const std::filesystem::path& dir, const Table& t) {
  const auto file = dir / (t.name + ".csv");
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

Table matrix_table(const std::string& name, const RMat& m) {
  Table t{name, {"index"}, {}};
  for (Eigen::Index j = 0; j < m.cols(); ++j) t.header.push_back(std::to_string(j));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(fmt(m(i, j)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void add_complex_matrix(std::vector<Table>& out, const std::string& name, const CMat& m) {
  out.push_back(matrix_table(name + "_re", m.real()));
  out.push_back(matrix_table(name + "_im", m.imag()));
}

Table basis_legend(const FockBasis& b) {
  Table t{"basis_legend", {"index", "total"}, {}};
  for (int q = 0; q < b.num_modes(); ++q) t.header.push_back("n" + std::to_string(q));
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), std::to_string(b.total(i))};
    for (int n : b.state(i)) row.push_back(std::to_string(n));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace nfk::cli
