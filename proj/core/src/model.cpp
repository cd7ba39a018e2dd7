// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace nfk {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Grid

ModeGrid build_grid(int d, double cutoff, int cells_per_axis, std::size_t cap) {
  if (d < 1 || d > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (!(cutoff > 0.0)) throw std::invalid_argument("grid cutoff must be positive");
  if (cells_per_axis < 1) throw std::invalid_argument("cells_per_axis must be >= 1");
  if (cells_per_axis % 2 == 1) {
    // The middle cell is centred on k = 0.
    throw std::invalid_argument("degenerate grid: a cell centre sits at k = 0");
  }
  const int n = cells_per_axis;
  ModeGrid g;
  g.d = d;
  g.cutoff = cutoff;
  g.cells_per_axis = n;
  g.h = 2.0 * cutoff / n;
  g.axis_centers.resize(n);
  for (int i = 0; i < n; ++i) g.axis_centers[i] = -cutoff + g.h * (i + 0.5);

  std::vector<Eigen::Vector3i> keep;
  const double r2max = cutoff * cutoff * (1.0 + 1e-12);
  Eigen::Vector3i idx = Eigen::Vector3i::Zero();
  for (;;) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += g.axis_centers[idx[a]] * g.axis_centers[idx[a]];
    if (r2 <= r2max) {
      keep.push_back(idx);
      if (keep.size() > cap) throw std::length_error("mode count exceeds cap");
    }
    int a = d - 1;
    while (a >= 0 && idx[a] == n - 1) {
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
    ++idx[a];
  }
  if (keep.empty()) throw std::invalid_argument("grid has no modes");

  const auto m = static_cast<Eigen::Index>(keep.size());
  g.momenta.resize(d, m);
  g.axis.resize(d, m);
  g.weights = RVec::Constant(m, std::pow(g.h, d));
  g.norms.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int a = 0; a < d; ++a) {
      g.axis(a, i) = keep[i][a];
      g.momenta(a, i) = g.axis_centers[keep[i][a]];
    }
    g.norms[i] = g.momenta.col(i).norm();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Dispersions and couplings

double ParticleDispersion::radial(double r) const {
  if (variant == Variant::NonRel) return 0.5 * r * r;
  return std::sqrt(r * r + M * M) - M;
}

double ParticleDispersion::operator()(const RVec& p) const {
  if (variant == Variant::NonRel) return 0.5 * p.squaredNorm();
  // sqrt(p^2 + M^2) - M written to avoid cancellation at small p.
  const double p2 = p.squaredNorm();
  return p2 / (std::sqrt(p2 + M * M) + M);
}

double eval_particle_dispersion(const ParticleDispersion& disp, const RVec& p) {
  return disp(p);
}

double BosonDispersion::operator()(double k_norm) const {
  if (variant == Variant::ConstantOne) return 1.0;
  return std::sqrt(k_norm * k_norm + m * m);
}

double CouplingSpec::profile(double k_norm, const BosonDispersion& boson) const {
  if (!(k_norm < Lambda)) return 0.0;
  if (variant == Variant::NelsonUV) return lambda / std::sqrt(boson(k_norm));
  return lambda / k_norm;
}

RVec boson_omega(const BosonDispersion& boson, const ModeGrid& grid) {
  RVec om(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    om[i] = boson(grid.norms[i]);
    if (!(om[i] > 0.0)) throw std::domain_error("omega must be positive on every cell");
  }
  return om;
}

OneBosonVector discretize_coupling(const CouplingSpec& spec,
                                   const BosonDispersion& boson,
                                   const ModeGrid& grid) {
  OneBosonVector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    v[i] = spec.lambda == 0.0
               ? 0.0
               : spec.profile(grid.norms[i], boson) * std::sqrt(grid.weights[i]);
  }
  return v;
}

bool ModelSpec::canonical() const {
  if (particle.variant == ParticleDispersion::Variant::NonRel) return d == 3;
  return d == 2 && boson.variant == BosonDispersion::Variant::Massive && boson.m > 0.0;
}

Model resolve(const ModelSpec& spec) {
  if (std::isfinite(spec.coupling.Lambda) &&
      spec.coupling.Lambda > spec.grid.cutoff * (1.0 + 1e-12)) {
    throw std::invalid_argument("coupling Lambda exceeds the grid cutoff");
  }
  if (!(spec.coupling.Lambda > 0.0)) {
    throw std::invalid_argument("coupling Lambda must be positive");
  }
  if (spec.particle.M < 0.0 || spec.boson.m < 0.0) {
    throw std::invalid_argument("masses must be non-negative");
  }
  Model m;
  m.spec = spec;
  m.grid = build_grid(spec.d, spec.grid.cutoff, spec.grid.cells_per_axis);
  m.omega = boson_omega(spec.boson, m.grid);
  m.v = discretize_coupling(spec.coupling, spec.boson, m.grid);
  return m;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(path + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument(path + "." + key + ": unknown key");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(path + "." + key + ": missing");
  }
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  throw std::invalid_argument(path + ": expected a number");
}

}  // namespace

ModelSpec model_from_json(const json& j) {
  const std::string root = "model";
  reject_unknown(j, root, {"d", "particle", "boson", "coupling", "grid"});
  ModelSpec m;
  const json& d = need(j, root, "d");
  if (!d.is_number_integer()) throw std::invalid_argument("model.d: expected an integer");
  m.d = d.get<int>();
  if (m.d < 1 || m.d > 3) throw std::invalid_argument("model.d: must be 1, 2 or 3");

  const json& p = need(j, root, "particle");
  reject_unknown(p, root + ".particle", {"variant", "M"});
  const auto pv = need(p, root + ".particle", "variant").get<std::string>();
  if (pv == "NonRel") {
    m.particle.variant = ParticleDispersion::Variant::NonRel;
  } else if (pv == "SemiRel") {
    m.particle.variant = ParticleDispersion::Variant::SemiRel;
  } else {
    throw std::invalid_argument("model.particle.variant: expected NonRel or SemiRel");
  }
  if (p.contains("M")) m.particle.M = as_number(p.at("M"), root + ".particle.M");

  const json& b = need(j, root, "boson");
  reject_unknown(b, root + ".boson", {"variant", "m"});
  const auto bv = need(b, root + ".boson", "variant").get<std::string>();
  if (bv == "Massive") {
    m.boson.variant = BosonDispersion::Variant::Massive;
  } else if (bv == "ConstantOne") {
    m.boson.variant = BosonDispersion::Variant::ConstantOne;
  } else {
    throw std::invalid_argument("model.boson.variant: expected Massive or ConstantOne");
  }
  if (b.contains("m")) m.boson.m = as_number(b.at("m"), root + ".boson.m");

  const json& c = need(j, root, "coupling");
  reject_unknown(c, root + ".coupling", {"variant", "lambda", "Lambda"});
  const auto cv = need(c, root + ".coupling", "variant").get<std::string>();
  if (cv == "NelsonUV") {
    m.coupling.variant = CouplingSpec::Variant::NelsonUV;
  } else if (cv == "FrohlichUV") {
    m.coupling.variant = CouplingSpec::Variant::FrohlichUV;
  } else {
    throw std::invalid_argument("model.coupling.variant: expected NelsonUV or FrohlichUV");
  }
  m.coupling.lambda = as_number(need(c, root + ".coupling", "lambda"), root + ".coupling.lambda");
  if (c.contains("Lambda")) {
    m.coupling.Lambda = as_number(c.at("Lambda"), root + ".coupling.Lambda");
  }

  const json& g = need(j, root, "grid");
  reject_unknown(g, root + ".grid", {"cutoff", "cells_per_axis"});
  m.grid.cutoff = as_number(need(g, root + ".grid", "cutoff"), root + ".grid.cutoff");
  const json& n = need(g, root + ".grid", "cells_per_axis");
  if (!n.is_number_integer()) {
    throw std::invalid_argument("model.grid.cells_per_axis: expected an integer");
  }
  m.grid.cells_per_axis = n.get<int>();
  return m;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["d"] = m.d;
  j["particle"] = {{"variant", m.particle.variant == ParticleDispersion::Variant::NonRel
                                   ? "NonRel"
                                   : "SemiRel"},
                   {"M", m.particle.M}};
  j["boson"] = {{"variant", m.boson.variant == BosonDispersion::Variant::Massive
                                ? "Massive"
                                : "ConstantOne"},
                {"m", m.boson.m}};
  json lam = std::isfinite(m.coupling.Lambda) ? json(m.coupling.Lambda) : json("inf");
  j["coupling"] = {{"variant", m.coupling.variant == CouplingSpec::Variant::NelsonUV
                                   ? "NelsonUV"
                                   : "FrohlichUV"},
                   {"lambda", m.coupling.lambda},
                   {"Lambda", lam}};
  j["grid"] = {{"cutoff", m.grid.cutoff}, {"cells_per_axis", m.grid.cells_per_axis}};
  return j;
}

// ---------------------------------------------------------------------------
// Operators

RVec particle_diagonal(const ParticleDispersion& disp, const RVec& P,
                       const FockBasis& b, const RMat& momenta) {
  const RMat K = total_momenta(b, momenta);
  RVec d(static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = disp(P - K.col(i));
  return d;
}

FockOperator build_hamiltonian(const Model& model, const RVec& P,
                               const BasisPtr& b) {
  if (b->num_modes() != model.modes()) {
    throw std::invalid_argument("basis mode count differs from the grid");
  }
  if (P.size() != model.d()) throw std::invalid_argument("P has the wrong dimension");
  const RVec diag = particle_diagonal(model.spec.particle, P, *b, model.grid.momenta) +
                    second_quantize_real(model.omega, *b);
  CMat H = field_op(model.v, b).dense_matrix();
  H.diagonal() += diag.cast<cplx>();
  return FockOperator::dense(b, std::move(H));
}

double renorm_energy(const ModelSpec& spec, RenormMethod method) {
  if (spec.coupling.lambda == 0.0) return 0.0;
  if (method == RenormMethod::GridSum) {
    const Model m = resolve(spec);
    double e = 0.0;
    for (int i = 0; i < m.modes(); ++i) {
      const double psi = spec.particle.radial(m.grid.norms[i]);
      e -= std::norm(m.v[i]) / (psi + m.omega[i]);
    }
    return e;
  }
  const double L = spec.coupling.Lambda;
  if (!std::isfinite(L)) throw std::invalid_argument("radial quadrature needs a finite Lambda");
  const int d = spec.d;
  const double sphere = d == 1 ? 2.0 : d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  auto integrand = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double vr = spec.coupling.variant == CouplingSpec::Variant::NelsonUV
                          ? spec.coupling.lambda / std::sqrt(spec.boson(r))
                          : spec.coupling.lambda / r;
    return sphere * std::pow(r, d - 1) * vr * vr /
           (spec.particle.radial(r) + spec.boson(r));
  };
  using boost::math::quadrature::gauss_kronrod;
  const double val = gauss_kronrod<double, 61>::integrate(integrand, 0.0, L, 15, 1e-13);
  return -val;
}

LOperator build_L(const RVec& P1, const RVec& P2, const std::vector<int>& theta1,
                  const std::vector<int>& theta2,
                  const ParticleDispersion& disp, const BasisPtr& b,
                  const ModeGrid& grid) {
  std::set<int> s1(theta1.begin(), theta1.end());
  for (int q : theta2) {
    if (s1.count(q)) throw std::invalid_argument("theta1 and theta2 overlap");
  }
  std::vector<int> both = theta1;
  both.insert(both.end(), theta2.begin(), theta2.end());
  const auto keep = q_mask(both, *b);
  std::vector<bool> in1(b->num_modes(), false);
  for (int q : theta1) in1[q] = true;

  CVec diag = CVec::Zero(static_cast<Eigen::Index>(b->size()));
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b->size(); ++i) {
    if (!keep[i]) continue;
    const Occupation& n = b->state(i);
    RVec K1 = RVec::Zero(grid.d), K2 = RVec::Zero(grid.d);
    for (int q = 0; q < b->num_modes(); ++q) {
      if (!n[q]) continue;
      (in1[q] ? K1 : K2) += n[q] * grid.momenta.col(q);
    }
    const double val = disp(P1 - K1) + disp(P2 - K2) - disp(P1 + P2 - K1 - K2);
    diag[static_cast<Eigen::Index>(i)] = val;
    lo = std::min(lo, val);
  }
  return LOperator{FockOperator::diagonal(b, std::move(diag)), lo};
}

// ---------------------------------------------------------------------------
// Time profiles

TimeProfile nelson_profile(const Model& model) {
  TimeProfile p;
  const OneBosonVector g = -model.v;
  p.f = [](double t) { return t; };
  p.fprime = [](double) { return 1.0; };
  p.g_minus = [g](double) { return g; };
  p.g_plus = [g](double) { return g; };
  p.time_independent = true;
  p.name = "nelson";
  return p;
}

TimeProfile modulated_profile(const Model& model, double a, double w, double b) {
  if (!(std::abs(a) < 1.0) || !(w > 0.0)) {
    throw std::invalid_argument("modulated profile needs |a| < 1 and w > 0");
  }
  TimeProfile p;
  const OneBosonVector g = -model.v;
  p.f = [a, w](double t) { return t + a * std::sin(w * t) / w; };
  p.fprime = [a, w](double t) { return 1.0 + a * std::cos(w * t); };
  p.g_minus = [g, b](double t) -> OneBosonVector { return g * (1.0 + b * std::sin(t)); };
  p.g_plus = [g, b](double t) -> OneBosonVector { return g * (1.0 + b * std::cos(t)); };
  p.time_independent = false;
  p.name = "modulated";
  return p;
}

FockOperator build_generator(const Model& model, const RVec& P,
                             const TimeProfile& profile, double t,
                             const BasisPtr& b) {
  const RVec diag = particle_diagonal(model.spec.particle, P, *b, model.grid.momenta) +
                    profile.fprime(t) * second_quantize_real(model.omega, *b);
  CMat G = -annihilation_matrix(profile.g_minus(t), b).dense_matrix() -
           creation_matrix(profile.g_plus(t), b).dense_matrix();
  G.diagonal() += diag.cast<cplx>();
  return FockOperator::dense(b, std::move(G));
}

}  // namespace nfk
