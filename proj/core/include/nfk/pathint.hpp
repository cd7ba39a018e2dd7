// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pathint.hpp
 * @brief Path functionals u, U^-, U^+ and the Monte Carlo semigroup estimator.
 *
 * Along a path X on nodes t_0 < ... < t_J of the window [s, t], with
 * heat time tau(r) = f(r) - f(s):
 *
 *   U^-  = int e^{-i k X_r} e^{-tau(r) omega} g_-(r) dr
 *   U^+  = int e^{-i k X_r} e^{-(tau(t) - tau(r)) omega} g_+(r) dr
 *   u    = conj( int < e^{-i k X_r} g_-(r), U_{v_r^+}(s, r) > dr )
 *
 * and the per-path operator is
 *
 *   W = e^u F_{tau(t)/2}(U^-) F_{tau(t)/2}(U^+)^dagger e^{i (P - dGamma(k)) (X_t - X_s)}.
 *
 * All integrals use the composite trapezoid rule on the path nodes.
 */

#pragma once

#include "nfk/fock.hpp"
#include "nfk/levy.hpp"
#include "nfk/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nfk {

/// e^{-i k_i . X_{t_j}} as an M x (J+1) matrix.
CMat mode_phases(const ModeGrid& grid, const LevyPath& path);

/// Trapezoid weights on the path nodes.
RVec trapezoid_weights(const TimeGrid& grid);

using TimeVector = std::function<OneBosonVector(double)>;
using Kernel = std::function<OneBosonVector(double, double)>;

/// sum_j w_j e^{-i k X_{t_j}} v(t_j).
OneBosonVector compute_U(const TimeVector& v_of_t, const ModeGrid& grid,
                         const LevyPath& path);

/// Double trapezoid of < e^{-i k X_t'} alpha^-(t', s'), e^{-i k X_s'} alpha^+(t', s') >.
cplx compute_u_double(const Kernel& alpha_minus, const Kernel& alpha_plus,
                      const ModeGrid& grid, const LevyPath& path);

/// alpha^- = 2^{-1/2} g_-(t'), alpha^+ = 2^{-1/2} e^{-|f(t') - f(s')| omega} g_+(s').
std::pair<Kernel, Kernel> profile_kernels(const Model& model,
                                          const TimeProfile& profile);

struct PathFunctionals {
  cplx u = 0.0;
  OneBosonVector U_minus;
  OneBosonVector U_plus;
  double s = 0.0;
  double t = 0.0;
  double dt = 0.0;
  double heat_time = 0.0;  ///< f(t) - f(s)
};

/// Nested-trapezoid single form of u, O(J M).
cplx u_single_form(const Model& model, const TimeProfile& profile,
                   const LevyPath& path);

/// u, U^-, U^+ in one pass; `with_U = false` skips the one-boson vectors.
PathFunctionals compute_nelson_functionals(const Model& model,
                                           const TimeProfile& profile,
                                           const LevyPath& path,
                                           bool with_U = true);

/// Same as above with precomputed phases.
PathFunctionals compute_nelson_functionals(const Model& model,
                                           const TimeProfile& profile,
                                           const LevyPath& path,
                                           const CMat& phases, bool with_U);

/// W without the momentum phase, times the product of the insertions.
FockOperator assemble_W(const PathFunctionals& fn, const Model& model,
                        const BasisPtr& b,
                        const std::vector<cplx>& insertions = {});

/// Reusable W assembly on a fixed basis.
class WAssembler {
 public:
  WAssembler(const Model& model, BasisPtr b);

  const BasisPtr& basis() const { return table_.basis(); }
  /// out = c e^u F(U^-) F(U^+)^dagger diag(phase).
  void assemble(const PathFunctionals& fn, cplx c, const CVec* right_phase,
                CMat& out);

 private:
  RVec omega_;
  FSeriesTable table_;
  std::vector<cplx> fm_, fp_;
};

struct SemigroupEstimate {
  FockOperator mean;
  RMat se;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  int J = 0;
  double s = 0.0;
  double t = 0.0;
  RVec P;
  std::string fingerprint;
};

struct McParams {
  std::size_t n_paths = 1000;
  int J = 64;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t block = 1024;
};

/// Scalar factors multiplying each path weight: u_double per kernel pair.
struct MomentSpec {
  std::vector<std::pair<Kernel, Kernel>> kernels;
};

struct McOptions {
  double energy_shift = 0.0;          ///< weights times e^{(t-s) shift}
  std::optional<MomentSpec> moments;
  bool refine = false;                ///< also estimate at 2J on the same paths
};

struct McResult {
  SemigroupEstimate estimate;               ///< at J
  std::optional<SemigroupEstimate> refined;  ///< at 2J, common random numbers
};

McResult mc_semigroup(const Model& model, const TimeProfile& profile,
                      const RVec& P, double s, double t, const BasisPtr& b,
                      const McParams& params, const McOptions& opts = {});

/// One estimate per model, each weighted by e^{u + (t-s) E_Lambda}; all models
/// share (seed, path_index), hence the same driving paths.
std::vector<SemigroupEstimate> mc_semigroup_renormalized(
    const std::vector<Model>& family, const RVec& P, double s, double t,
    int max_bosons, const McParams& params);

std::string fingerprint(const Model& model, const TimeProfile& profile);

}  // namespace nfk
