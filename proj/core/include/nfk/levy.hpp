// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file levy.hpp
 * @brief Brownian and relativistic (inverse-Gaussian subordinated) paths.
 *
 * Every path is a pure function of (seed, path_index): its generator is a
 * std::mt19937_64 seeded from both through std::seed_seq.
 */

#pragma once

#include "nfk/fock.hpp"
#include "nfk/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace nfk {

using Rng = std::mt19937_64;

Rng path_rng(std::uint64_t seed, std::uint64_t path_index);

struct LevyProcessSpec {
  enum class Variant { BrownianNR, RelativisticSR };
  Variant variant = Variant::BrownianNR;
  int d = 1;
  double M = 0.0;
};

/// Process whose exponent is the model's particle dispersion.
LevyProcessSpec process_for(const ModelSpec& spec);

struct TimeGrid {
  double s = 0.0;
  double t = 1.0;
  int J = 1;

  TimeGrid() = default;
  TimeGrid(double s_, double t_, int J_);

  double dt() const { return (t - s) / J; }
  double node(int j) const { return s + j * dt(); }
};

struct LevyPath {
  LevyProcessSpec spec;
  TimeGrid grid;
  RMat X;  ///< d x (J+1), X.col(0) = 0
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

LevyPath sample_path(const LevyProcessSpec& spec, const TimeGrid& grid,
                     std::uint64_t seed, std::uint64_t path_index);

/// Keeps every `factor`-th node; the law of the coarse path is exact.
LevyPath coarsen(const LevyPath& fine, int factor);

/// Deterministic path, e.g. X = 0, for exactness tests.
LevyPath injected_path(const LevyProcessSpec& spec, const TimeGrid& grid,
                       const RMat& X);

double char_exponent(const LevyProcessSpec& spec, const RVec& k);

/// Inverse Gaussian with mean mu and shape lam (Michael, Schucany, Haas).
double sample_inverse_gaussian(double mu, double lam, Rng& rng);

/// Subordinator increment with Laplace transform e^{-dt (sqrt(2u + M^2) - M)}.
double ig_subordinator_increment(double M, double dt, Rng& rng);

struct CharTestRow {
  double time = 0.0;
  cplx mean;
  double se = 0.0;      ///< standard error of the complex mean
  double target = 0.0;
  double z = 0.0;       ///< |mean - target| / se
};

/// E[e^{i k X_t}] against e^{-t Psi(k)} at each time.
std::vector<CharTestRow> empirical_char_test(const LevyProcessSpec& spec,
                                             const RVec& k,
                                             const std::vector<double>& times,
                                             std::size_t n_samples,
                                             std::uint64_t seed);

/// E[e^{i k1 X_t1} e^{i k2 X_t2}] against e^{-t1 Psi(k1+k2)} e^{-(t2-t1) Psi(k2)}.
CharTestRow two_time_test(const LevyProcessSpec& spec, const RVec& k1,
                          const RVec& k2, double t1, double t2,
                          std::size_t n_samples, std::uint64_t seed);

struct ScalarTest {
  double mean = 0.0;
  double se = 0.0;
  double target = 0.0;
  double z = 0.0;
};

/// Sample mean of IG subordinator increments against dt / M.
ScalarTest ig_mean_test(double M, double dt, std::size_t n, std::uint64_t seed);
/// Empirical E[e^{-u S}] against e^{-dt (sqrt(2u + M^2) - M)}.
ScalarTest ig_laplace_test(double M, double dt, double u, std::size_t n,
                           std::uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace nfk
