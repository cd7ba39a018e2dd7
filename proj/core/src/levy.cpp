// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfk {

Rng path_rng(std::uint64_t seed, std::uint64_t path_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path_index),
                    static_cast<std::uint32_t>(path_index >> 32)};
  return Rng(seq);
}

LevyProcessSpec process_for(const ModelSpec& spec) {
  LevyProcessSpec p;
  p.d = spec.d;
  if (spec.particle.variant == ParticleDispersion::Variant::NonRel) {
    p.variant = LevyProcessSpec::Variant::BrownianNR;
  } else {
    p.variant = LevyProcessSpec::Variant::RelativisticSR;
    p.M = spec.particle.M;
  }
  return p;
}

TimeGrid::TimeGrid(double s_, double t_, int J_) : s(s_), t(t_), J(J_) {
  if (!(t > s)) throw std::invalid_argument("time grid needs t > s");
  if (J < 1) throw std::invalid_argument("time grid needs J >= 1");
}

double sample_inverse_gaussian(double mu, double lam, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double nu = normal(rng);
  const double y = nu * nu;
  const double muy = mu * y;
  const double x = mu + mu * muy / (2.0 * lam) -
                   mu / (2.0 * lam) * std::sqrt(4.0 * lam * muy + muy * muy);
  // Guard the cancellation branch: x can round to a tiny or zero value.
  const double xs = std::max(x, std::numeric_limits<double>::min());
  return unif(rng) <= mu / (mu + xs) ? xs : mu * mu / xs;
}

double ig_subordinator_increment(double M, double dt, Rng& rng) {
  if (!(M > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("IG increment needs M > 0 and dt > 0");
  }
  return sample_inverse_gaussian(dt / M, dt * dt, rng);
}

LevyPath sample_path(const LevyProcessSpec& spec, const TimeGrid& grid,
                     std::uint64_t seed, std::uint64_t path_index) {
  if (!(grid.t > grid.s) || grid.J < 1) {
    throw std::invalid_argument("sample_path needs a non-degenerate window");
  }
  LevyPath p;
  p.spec = spec;
  p.grid = grid;
  p.seed = seed;
  p.path_index = path_index;
  p.X = RMat::Zero(spec.d, grid.J + 1);
  Rng rng = path_rng(seed, path_index);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = grid.dt();
  for (int j = 1; j <= grid.J; ++j) {
    double var = dt;
    if (spec.variant == LevyProcessSpec::Variant::RelativisticSR) {
      if (spec.M > 0.0) {
        var = ig_subordinator_increment(spec.M, dt, rng);
      } else {
        // One-sided stable(1/2) time change: B_S is Cauchy with scale dt.
        double z = 0.0;
        while (z == 0.0) z = normal(rng);
        var = dt * dt / (z * z);
      }
    }
    const double sd = std::sqrt(var);
    for (int a = 0; a < spec.d; ++a) {
      p.X(a, j) = p.X(a, j - 1) + sd * normal(rng);
    }
  }
  return p;
}

LevyPath coarsen(const LevyPath& fine, int factor) {
  if (factor < 1 || fine.grid.J % factor != 0) {
    throw std::invalid_argument("coarsen factor must divide J");
  }
  LevyPath c = fine;
  c.grid = TimeGrid(fine.grid.s, fine.grid.t, fine.grid.J / factor);
  c.X.resize(fine.X.rows(), c.grid.J + 1);
  for (int j = 0; j <= c.grid.J; ++j) c.X.col(j) = fine.X.col(j * factor);
  return c;
}

LevyPath injected_path(const LevyProcessSpec& spec, const TimeGrid& grid,
                       const RMat& X) {
  if (X.rows() != spec.d || X.cols() != grid.J + 1) {
    throw std::invalid_argument("injected path has the wrong shape");
  }
  LevyPath p;
  p.spec = spec;
  p.grid = grid;
  p.X = X;
  return p;
}

double char_exponent(const LevyProcessSpec& spec, const RVec& k) {
  const double k2 = k.squaredNorm();
  if (spec.variant == LevyProcessSpec::Variant::BrownianNR) return 0.5 * k2;
  return k2 / (std::sqrt(k2 + spec.M * spec.M) + spec.M);
}

namespace {

struct ComplexMoments {
  cplx sum = 0.0;
  double sum_abs2 = 0.0;
  std::size_t n = 0;

  void add(cplx x) {
    sum += x;
    sum_abs2 += std::norm(x);
    ++n;
  }
  cplx mean() const { return sum / static_cast<double>(n); }
  double se() const {
    const double nn = static_cast<double>(n);
    const double var = (sum_abs2 - std::norm(sum) / nn) / (nn - 1.0);
    return std::sqrt(std::max(var, 0.0) / nn);
  }
};

CharTestRow finish(double time, const ComplexMoments& m, double target) {
  CharTestRow r;
  r.time = time;
  r.mean = m.mean();
  r.se = m.se();
  r.target = target;
  const double dev = std::abs(r.mean - target);
  r.z = r.se > 0.0 ? dev / r.se : (dev == 0.0 ? 0.0 : INFINITY);
  return r;
}

// Node grid containing all requested times; returns the node per time.
TimeGrid grid_for(const std::vector<double>& times, std::vector<int>& nodes) {
  const double tmax = *std::max_element(times.begin(), times.end());
  // Resolve times on a uniform grid of step tmax / J.
  for (int J = 1; J <= 4096; J *= 2) {
    bool ok = true;
    nodes.clear();
    for (double t : times) {
      const double x = t / tmax * J;
      const double r = std::round(x);
      if (std::abs(x - r) > 1e-9) {
        ok = false;
        break;
      }
      nodes.push_back(static_cast<int>(r));
    }
    if (ok) return TimeGrid(0.0, tmax, J);
  }
  throw std::invalid_argument("times are not commensurate on a dyadic grid");
}

}  // namespace

std::vector<CharTestRow> empirical_char_test(const LevyProcessSpec& spec,
                                             const RVec& k,
                                             const std::vector<double>& times,
                                             std::size_t n_samples,
                                             std::uint64_t seed) {
  if (n_samples < 100) throw std::invalid_argument("empirical_char_test needs n >= 100");
  if (times.empty()) throw std::invalid_argument("no times given");
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("times must be positive");
  }
  std::vector<int> nodes;
  const TimeGrid grid = grid_for(times, nodes);
  std::vector<ComplexMoments> acc(times.size());
  for (std::size_t p = 0; p < n_samples; ++p) {
    const LevyPath path = sample_path(spec, grid, seed, p);
    for (std::size_t i = 0; i < times.size(); ++i) {
      acc[i].add(std::polar(1.0, k.dot(path.X.col(nodes[i]))));
    }
  }
  std::vector<CharTestRow> rows;
  const double psi = char_exponent(spec, k);
  for (std::size_t i = 0; i < times.size(); ++i) {
    rows.push_back(finish(times[i], acc[i], std::exp(-times[i] * psi)));
  }
  return rows;
}

CharTestRow two_time_test(const LevyProcessSpec& spec, const RVec& k1,
                          const RVec& k2, double t1, double t2,
                          std::size_t n_samples, std::uint64_t seed) {
  if (!(t2 > t1) || !(t1 > 0.0)) throw std::invalid_argument("need 0 < t1 < t2");
  std::vector<int> nodes;
  const TimeGrid grid = grid_for({t1, t2}, nodes);
  ComplexMoments acc;
  for (std::size_t p = 0; p < n_samples; ++p) {
    const LevyPath path = sample_path(spec, grid, seed, p);
    acc.add(std::polar(1.0, k1.dot(path.X.col(nodes[0])) + k2.dot(path.X.col(nodes[1]))));
  }
  const double target = std::exp(-t1 * char_exponent(spec, k1 + k2)) *
                        std::exp(-(t2 - t1) * char_exponent(spec, k2));
  return finish(t2, acc, target);
}

namespace {

ScalarTest scalar_finish(double sum, double sum2, std::size_t n, double target) {
  ScalarTest r;
  const double nn = static_cast<double>(n);
  r.mean = sum / nn;
  r.se = std::sqrt(std::max((sum2 - sum * sum / nn) / (nn - 1.0), 0.0) / nn);
  r.target = target;
  r.z = std::abs(r.mean - target) / r.se;
  return r;
}

}  // namespace

ScalarTest ig_mean_test(double M, double dt, std::size_t n, std::uint64_t seed) {
  Rng rng = path_rng(seed, 0);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ig_subordinator_increment(M, dt, rng);
    s += x;
    s2 += x * x;
  }
  return scalar_finish(s, s2, n, dt / M);
}

ScalarTest ig_laplace_test(double M, double dt, double u, std::size_t n,
                           std::uint64_t seed) {
  Rng rng = path_rng(seed, 0);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::exp(-u * ig_subordinator_increment(M, dt, rng));
    s += x;
    s2 += x * x;
  }
  return scalar_finish(s, s2, n, std::exp(-dt * (std::sqrt(2.0 * u + M * M) - M)));
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lam < 0.2) return KsResult{d, 1.0};
  // Kolmogorov tail series.
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return KsResult{d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace nfk
