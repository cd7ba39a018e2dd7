// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file model.hpp
 * @brief Dispersions, couplings, momentum grids and fiber Hamiltonians H(P).
 */

#pragma once

#include "nfk/fock.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace nfk {

inline constexpr std::size_t kDefaultModeCap = 20000;

/// Half-cell offset Cartesian cells inside the ball |k| <= cutoff.
struct ModeGrid {
  int d = 0;
  double cutoff = 0.0;
  int cells_per_axis = 0;
  double h = 0.0;          ///< cell side
  RMat momenta;            ///< d x M
  RVec weights;            ///< cell volumes
  RVec norms;              ///< |k_i|
  Eigen::MatrixXi axis;    ///< d x M cell index per axis
  RVec axis_centers;       ///< centres along one axis

  int size() const { return static_cast<int>(weights.size()); }
  RVec k(int i) const { return momenta.col(i); }
};

ModeGrid build_grid(int d, double cutoff, int cells_per_axis,
                    std::size_t cap = kDefaultModeCap);

struct ParticleDispersion {
  enum class Variant { NonRel, SemiRel };
  Variant variant = Variant::NonRel;
  double M = 0.0;

  double operator()(const RVec& p) const;
  double radial(double r) const;
};

struct BosonDispersion {
  enum class Variant { Massive, ConstantOne };
  Variant variant = Variant::Massive;
  double m = 1.0;

  double operator()(double k_norm) const;
};

struct CouplingSpec {
  enum class Variant { NelsonUV, FrohlichUV };
  Variant variant = Variant::NelsonUV;
  double lambda = 0.0;
  double Lambda = std::numeric_limits<double>::infinity();

  /// v(k) without the quadrature weight.
  double profile(double k_norm, const BosonDispersion& boson) const;
};

struct GridSpec {
  double cutoff = 1.0;
  int cells_per_axis = 2;
};

struct ModelSpec {
  int d = 1;
  ParticleDispersion particle;
  BosonDispersion boson;
  CouplingSpec coupling;
  GridSpec grid;

  /// (NonRel, d=3) or (SemiRel, d=2, m>0).
  bool canonical() const;
};

/// Strict parser: unknown keys throw std::invalid_argument naming the path.
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& m);

/// A ModelSpec with its grid, omega and discretized coupling resolved.
struct Model {
  ModelSpec spec;
  ModeGrid grid;
  RVec omega;
  OneBosonVector v;

  int d() const { return spec.d; }
  int modes() const { return grid.size(); }
};

Model resolve(const ModelSpec& spec);

double eval_particle_dispersion(const ParticleDispersion& disp, const RVec& p);
RVec boson_omega(const BosonDispersion& boson, const ModeGrid& grid);

/// v(k_i) sqrt(w_i), zero where |k_i| >= Lambda.
OneBosonVector discretize_coupling(const CouplingSpec& spec,
                                   const BosonDispersion& boson,
                                   const ModeGrid& grid);

/// Diagonal Psi(P - K_n) over the basis.
RVec particle_diagonal(const ParticleDispersion& disp, const RVec& P,
                       const FockBasis& b, const RMat& momenta);

/// H = Psi(P - dGamma(k)) + dGamma(omega) + phi(v).
FockOperator build_hamiltonian(const Model& model, const RVec& P,
                               const BasisPtr& b);

enum class RenormMethod { GridSum, RadialQuadrature };

/// E_Lambda = -sum_i w_i v(k_i)^2 / (Psi(k_i) + omega(k_i)).
double renorm_energy(const ModelSpec& spec, RenormMethod method);

struct LOperator {
  FockOperator L;
  double lower_bound = 0.0;
};

/// Diagonal Psi(P1 - K_{n,theta1}) + Psi(P2 - K_{n,theta2}) - Psi(P1+P2 - K_n)
/// on states supported in theta1 u theta2; zero elsewhere.
LOperator build_L(const RVec& P1, const RVec& P2, const std::vector<int>& theta1,
                  const std::vector<int>& theta2,
                  const ParticleDispersion& disp, const BasisPtr& b,
                  const ModeGrid& grid);

/**
 * Time scale f and coupling profiles g_-, g_+ driving the generator
 * h(t) = Psi(P - dGamma(k)) + dGamma(omega f'(t)) - a(g_-(t)) - a^dagger(g_+(t)).
 */
struct TimeProfile {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::function<OneBosonVector(double)> g_minus;
  std::function<OneBosonVector(double)> g_plus;
  bool time_independent = false;
  std::string name;
};

/// f(t) = t, g_+- = -v.
TimeProfile nelson_profile(const Model& model);

/// f(t) = t + a sin(w t) / w, g_-(t) = -v (1 + b sin t), g_+(t) = -v (1 + b cos t).
TimeProfile modulated_profile(const Model& model, double a, double w, double b);

FockOperator build_generator(const Model& model, const RVec& P,
                             const TimeProfile& profile, double t,
                             const BasisPtr& b);

}  // namespace nfk
