// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file parallel.hpp
 * @brief Worker fan-out over fixed index blocks, plus compensated sums.
 *
 * Block boundaries depend only on the item count and block size, never on
 * the number of workers, so any reduction done per block and then combined
 * in block order is bit-identical for every worker count.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nfk {

struct BlockRange {
  std::size_t index;
  std::size_t begin;
  std::size_t end;
};

inline std::size_t block_count(std::size_t n_items, std::size_t block) {
  return (n_items + block - 1) / block;
}

/// Calls fn(BlockRange) once per block; blocks are claimed dynamically.
template <class Fn>
void for_each_block(std::size_t n_items, std::size_t block, int workers, Fn&& fn) {
  const std::size_t nb = block_count(n_items, block);
  auto range = [&](std::size_t b) {
    return BlockRange{b, b * block, std::min(n_items, (b + 1) * block)};
  };
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(nb)));
  if (w <= 1) {
    for (std::size_t b = 0; b < nb; ++b) fn(range(b));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= nb) return;
        try {
          fn(range(b));
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          next.store(nb);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// Neumaier summation, entrywise over Eigen arrays.
template <class Array>
class CompensatedSum {
 public:
  CompensatedSum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Array::Zero(rows, cols)), comp_(Array::Zero(rows, cols)) {}

  void add(const Array& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) add_one(i, x.data()[i]);
  }
  Array value() const { return sum_ + comp_; }

 private:
  template <class T>
  static void step(T& s, T& c, T x) {
    const T t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  void add_one(Eigen::Index i, double x) { step(sum_.data()[i], comp_.data()[i], x); }
  void add_one(Eigen::Index i, std::complex<double> x) {
    double sr = sum_.data()[i].real(), cr = comp_.data()[i].real();
    double si = sum_.data()[i].imag(), ci = comp_.data()[i].imag();
    step(sr, cr, x.real());
    step(si, ci, x.imag());
    sum_.data()[i] = {sr, si};
    comp_.data()[i] = {cr, ci};
  }

  Array sum_;
  Array comp_;
};

}  // namespace nfk
