// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nfk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CMat compress(const CMat& big, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  CMat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = big(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                      static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

TimeProfile flipped_profile(const Model& model) {
  TimeProfile p = nelson_profile(model);
  const OneBosonVector g = model.v;
  p.g_minus = [g](double) { return g; };
  p.g_plus = [g](double) { return g; };
  p.name = "nelson-flipped";
  return p;
}

}  // namespace

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("log_slope needs two or more points");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Oracles

FockOperator oracle_expm(const FockOperator& H, double t) {
  if (!(t >= 0.0)) throw std::domain_error("oracle_expm needs t >= 0");
  if (H.is_diagonal()) {
    const CVec d = H.diagonal_entries();
    if (d.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("oracle_expm needs a hermitian operator");
    }
    return FockOperator::diagonal(H.basis(), (-t * d.real()).array().exp().cast<cplx>().matrix());
  }
  if (!H.hermitian()) throw std::invalid_argument("oracle_expm needs a hermitian operator");
  Eigen::SelfAdjointEigenSolver<CMat> es(H.dense_matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const RVec w = (-t * es.eigenvalues().array()).exp();
  CMat S = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return FockOperator::dense(H.basis(), std::move(S));
}

CMat expm_general(const CMat& A) { return A.exp(); }

FockOperator padded_oracle(const Model& model, const RVec& P, double t,
                           const BasisPtr& b, int pad) {
  if (pad < 0) throw std::invalid_argument("pad must be >= 0");
  const BasisPtr big = enumerate_basis(b->num_modes(), b->max_bosons() + pad);
  const FockOperator S = oracle_expm(build_hamiltonian(model, P, big), t);
  return FockOperator::dense(b, compress(S.to_dense(), embed_indices(*b, *big)));
}

FockOperator propagator(const Model& model, const TimeProfile& profile,
                        const RVec& P, double s, double t, const BasisPtr& b,
                        double max_step) {
  if (!(t >= s)) throw std::invalid_argument("propagator needs t >= s");
  const auto D = static_cast<Eigen::Index>(b->size());
  if (t == s) return FockOperator::dense(b, CMat::Identity(D, D));
  if (profile.time_independent) {
    const FockOperator h = build_generator(model, P, profile, s, b);
    if (h.hermitian()) return oracle_expm(h, t - s);
    return FockOperator::dense(b, expm_general(-(t - s) * h.dense_matrix()));
  }
  // Fourth-order Magnus with two Gauss-Legendre nodes per step.
  const int n = std::max(1, static_cast<int>(std::ceil((t - s) / max_step)));
  const double dt = (t - s) / n;
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  CMat S = CMat::Identity(D, D);
  for (int k = 0; k < n; ++k) {
    const double t0 = s + k * dt;
    const CMat A1 = -build_generator(model, P, profile, t0 + c1 * dt, b).dense_matrix();
    const CMat A2 = -build_generator(model, P, profile, t0 + c2 * dt, b).dense_matrix();
    const CMat Om = 0.5 * dt * (A1 + A2) +
                    (std::sqrt(3.0) / 12.0) * dt * dt * (A2 * A1 - A1 * A2);
    S = expm_general(Om) * S;
  }
  return FockOperator::dense(b, std::move(S));
}

Model restrict_model(const Model& model, const std::vector<int>& theta) {
  if (theta.empty()) throw std::invalid_argument("theta must not be empty");
  Model m;
  m.spec = model.spec;
  m.grid = model.grid;
  const auto n = static_cast<Eigen::Index>(theta.size());
  m.grid.momenta.resize(model.grid.d, n);
  m.grid.axis.resize(model.grid.d, n);
  m.grid.weights.resize(n);
  m.grid.norms.resize(n);
  m.omega.resize(n);
  m.v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int q = theta[static_cast<std::size_t>(i)];
    if (q < 0 || q >= model.modes()) throw std::out_of_range("theta index out of range");
    m.grid.momenta.col(i) = model.grid.momenta.col(q);
    m.grid.axis.col(i) = model.grid.axis.col(q);
    m.grid.weights[i] = model.grid.weights[q];
    m.grid.norms[i] = model.grid.norms[q];
    m.omega[i] = model.omega[q];
    m.v[i] = model.v[q];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Feynman-Kac comparison

FkReport fk_vs_oracle(const Model& model, const RVec& P, double t,
                      const BasisPtr& b, int pad, const McParams& params,
                      bool flip_sign) {
  const TimeProfile profile = flip_sign ? flipped_profile(model) : nelson_profile(model);
  McOptions opts;
  opts.refine = true;
  const McResult mc = mc_semigroup(model, profile, P, 0.0, t, b, params, opts);
  FkReport r;
  r.estimate = mc.estimate.mean.to_dense();
  r.estimate_fine = mc.refined->mean.to_dense();
  r.oracle = padded_oracle(model, P, t, b, pad).to_dense();
  r.deviation = (r.estimate - r.oracle).cwiseAbs();
  r.se = (mc.estimate.se.cwiseAbs2() + mc.refined->se.cwiseAbs2()).cwiseSqrt();
  r.budget = 2.0 * (r.estimate - r.estimate_fine).cwiseAbs();
  r.tolerance = 3.0 * r.se + r.budget;
  r.max_ratio = 0.0;
  r.max_z = 0.0;
  const CMat extrapolated = 2.0 * r.estimate_fine - r.estimate;
  for (Eigen::Index i = 0; i < r.deviation.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.deviation.cols(); ++j) {
      const double tol = r.tolerance(i, j);
      const double dev = r.deviation(i, j);
      const double ratio = tol > 0.0 ? dev / tol : (dev > 1e-13 ? INFINITY : 0.0);
      r.max_ratio = std::max(r.max_ratio, ratio);
      if (r.se(i, j) > 0.0) {
        r.max_z = std::max(r.max_z, std::abs(extrapolated(i, j) - r.oracle(i, j)) / r.se(i, j));
      }
    }
  }
  r.pass = r.max_ratio <= 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// Positivity

const char* to_string(Positivity p) {
  switch (p) {
    case Positivity::Improving: return "improving";
    case Positivity::Preserving: return "preserving";
    case Positivity::Neither: return "neither";
  }
  return "?";
}

namespace {

PositivityReport audit_impl(const CMat& S, const RMat& tol, const FockBasis& b) {
  PositivityReport rep;
  rep.min_entry = std::numeric_limits<double>::infinity();
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.block_minima.assign(static_cast<std::size_t>(b.max_bosons() + 1),
                          std::numeric_limits<double>::infinity());
  bool improving = true, preserving = true;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    auto& bm = rep.block_minima[static_cast<std::size_t>(b.total(static_cast<std::size_t>(i)))];
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      const double re = S(i, j).real();
      const double tij = tol(i, j);
      rep.min_entry = std::min(rep.min_entry, re);
      rep.max_imag = std::max(rep.max_imag, std::abs(S(i, j).imag()));
      rep.min_margin = std::min(rep.min_margin, re + tij);
      bm = std::min(bm, re);
      if (!(re > tij)) improving = false;
      if (!(re > -tij)) preserving = false;
    }
  }
  rep.classification = improving    ? Positivity::Improving
                       : preserving ? Positivity::Preserving
                                    : Positivity::Neither;
  return rep;
}

}  // namespace

PositivityReport positivity_audit(const FockOperator& S, double tol) {
  const CMat m = S.to_dense();
  PositivityReport rep = audit_impl(m, RMat::Constant(m.rows(), m.cols(), tol), *S.basis());
  rep.tol = tol;
  return rep;
}

PositivityReport positivity_audit(const SemigroupEstimate& S, double floor) {
  const CMat m = S.mean.to_dense();
  const RMat tol = (3.0 * S.se).cwiseMax(floor);
  PositivityReport rep = audit_impl(m, tol, *S.mean.basis());
  rep.tol = tol.maxCoeff();
  rep.fingerprint = S.fingerprint;
  return rep;
}

// ---------------------------------------------------------------------------
// Ground states

SpectralReport ground_state(const FockOperator& H, double t_power,
                            GroundMethod method) {
  const CMat h = H.to_dense();
  if (!is_hermitian(h)) throw std::invalid_argument("ground_state needs a hermitian operator");
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  SpectralReport rep;
  rep.E0 = es.eigenvalues()[0];
  rep.gap = h.rows() > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0] : INFINITY;
  CVec v = es.eigenvectors().col(0);

  if (method == GroundMethod::Power) {
    double tp = t_power;
    if (!(tp > 0.0)) {
      const double nrm = h.cwiseAbs().rowwise().sum().maxCoeff();
      tp = nrm > 0.0 ? 1.0 / nrm : 1.0;
    }
    const CMat S = oracle_expm(FockOperator::dense(H.basis(), h), tp).to_dense();
    CVec x = CVec::Ones(h.rows()).normalized();
    double E = (x.adjoint() * h * x)(0).real();
    int quiet = 0;
    int it = 0;
    for (; it < 1000000 && quiet < 10; ++it) {
      x = (S * x).normalized();
      const double En = (x.adjoint() * h * x)(0).real();
      quiet = std::abs(En - E) < 1e-14 * std::max(1.0, std::abs(En)) ? quiet + 1 : 0;
      E = En;
    }
    rep.E0 = E;
    rep.iterations = it;
    v = x;
  }
  // Global phase: make the largest entry real and positive.
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v *= std::conj(v[imax]) / std::abs(v[imax]);
  rep.ground = v;
  const double scale = v.cwiseAbs().maxCoeff();
  bool positive = true;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i].real() > 1e-12 * scale) || std::abs(v[i].imag()) > 1e-10 * scale) {
      positive = false;
    }
  }
  rep.perron = positive && rep.gap > 1e-10;
  return rep;
}

std::vector<DispersionRow> dispersion_scan(const Model& model,
                                           const std::vector<RVec>& P_list,
                                           const BasisPtr& b, double t_power) {
  std::vector<DispersionRow> rows;
  for (const RVec& P : P_list) {
    rows.push_back({P, ground_state(build_hamiltonian(model, P, b), t_power)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Renormalization

RenormReport renorm_scan(const ModelSpec& base,
                         const std::vector<double>& Lambda_list,
                         double cell_side, const RVec& P, double t,
                         const McParams& params) {
  if (Lambda_list.size() < 2) throw std::invalid_argument("need at least two cutoffs");
  if (!(cell_side > 0.0)) throw std::invalid_argument("cell side must be positive");
  std::vector<Model> family;
  for (double L : Lambda_list) {
    ModelSpec s = base;
    s.coupling.Lambda = L;
    s.grid.cutoff = L;
    const double cells = 2.0 * L / cell_side;
    s.grid.cells_per_axis = static_cast<int>(std::lround(cells));
    if (std::abs(cells - s.grid.cells_per_axis) > 1e-9) {
      throw std::invalid_argument("2 Lambda / cell_side must be an integer");
    }
    family.push_back(resolve(s));
  }
  const auto est = mc_semigroup_renormalized(family, P, 0.0, t, 0, params);
  RenormReport rep;
  for (std::size_t i = 0; i < family.size(); ++i) {
    RenormRow row;
    row.Lambda = Lambda_list[i];
    row.cells_per_axis = family[i].spec.grid.cells_per_axis;
    row.modes = family[i].modes();
    row.E_Lambda = renorm_energy(family[i].spec, RenormMethod::GridSum);
    row.vacuum = est[i].mean.to_dense()(0, 0);
    row.vacuum_se = est[i].se(0, 0);
    const double re = row.vacuum.real();
    row.E0_minus_ELambda = re > 0.0 ? -std::log(re) / t : kNaN;
    row.E0_minus_ELambda_se = re > 0.0 ? row.vacuum_se / (re * t) : kNaN;
    row.E0 = row.E0_minus_ELambda + row.E_Lambda;
    rep.rows.push_back(row);
  }
  rep.strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.differences.push_back(
        std::abs(rep.rows[i].E0_minus_ELambda - rep.rows[i - 1].E0_minus_ELambda));
  }
  for (std::size_t i = 1; i < rep.differences.size(); ++i) {
    if (!(rep.differences[i] < rep.differences[i - 1])) rep.strictly_decreasing = false;
  }
  for (double d : rep.differences) {
    if (!std::isfinite(d)) rep.strictly_decreasing = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Trotter

TrotterReport trotter_check(const Model& model, const RVec& P1, const RVec& P2,
                            const std::vector<int>& theta1,
                            const std::vector<int>& theta2, double T,
                            const std::vector<int>& N_list, int max_bosons,
                            int pad) {
  const int M = model.modes();
  const int Nb = max_bosons + pad;
  const BasisPtr big = enumerate_basis(M, Nb);
  const LOperator L = build_L(P1, P2, theta1, theta2, model.spec.particle, big, model.grid);

  std::vector<int> both = theta1;
  both.insert(both.end(), theta2.begin(), theta2.end());
  const auto keep = q_mask(both, *big);

  // Sub-propagator on the modes of theta; an empty region carries only the vacuum.
  struct Sub {
    BasisPtr basis;
    CMat S;
  };
  auto sub = [&](const std::vector<int>& theta, const RVec& P) -> Sub {
    if (theta.empty()) {
      return {nullptr, CMat::Constant(1, 1, std::exp(-T * model.spec.particle(P)))};
    }
    const Model m = restrict_model(model, theta);
    const BasisPtr bs = enumerate_basis(static_cast<int>(theta.size()), Nb);
    return {bs, oracle_expm(build_hamiltonian(m, P, bs), T).to_dense()};
  };
  const Sub sub1 = sub(theta1, P1), sub2 = sub(theta2, P2);
  const CMat& S1 = sub1.S;
  const CMat& S2 = sub2.S;
  auto local_index = [](const Sub& sb, const std::vector<int>& theta, const Occupation& n) {
    if (!sb.basis) return std::size_t{0};
    Occupation o;
    for (int q : theta) o.push_back(n[q]);
    return sb.basis->index_of(o);
  };

  const auto D = static_cast<Eigen::Index>(big->size());
  std::vector<std::size_t> i1(big->size(), kNoState), i2(big->size(), kNoState);
  for (std::size_t a = 0; a < big->size(); ++a) {
    if (!keep[a]) continue;
    const Occupation& n = big->state(a);
    i1[a] = local_index(sub1, theta1, n);
    i2[a] = local_index(sub2, theta2, n);
  }
  CMat target = CMat::Zero(D, D);
  for (Eigen::Index a = 0; a < D; ++a) {
    if (!keep[static_cast<std::size_t>(a)]) continue;
    for (Eigen::Index c = 0; c < D; ++c) {
      if (!keep[static_cast<std::size_t>(c)]) continue;
      target(a, c) = S1(static_cast<Eigen::Index>(i1[a]), static_cast<Eigen::Index>(i1[c])) *
                     S2(static_cast<Eigen::Index>(i2[a]), static_cast<Eigen::Index>(i2[c]));
    }
  }

  CVec q(D);
  for (Eigen::Index a = 0; a < D; ++a) q[a] = keep[static_cast<std::size_t>(a)] ? 1.0 : 0.0;
  const FockOperator H = build_hamiltonian(model, P1 + P2, big);

  std::vector<Eigen::Index> frame;
  for (std::size_t a = 0; a < big->size(); ++a) {
    if (big->total(a) <= max_bosons) frame.push_back(static_cast<Eigen::Index>(a));
  }
  auto frame_of = [&](const CMat& m) {
    CMat out(static_cast<Eigen::Index>(frame.size()), static_cast<Eigen::Index>(frame.size()));
    for (std::size_t i = 0; i < frame.size(); ++i) {
      for (std::size_t j = 0; j < frame.size(); ++j) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(frame[i], frame[j]);
      }
    }
    return out;
  };
  auto spectral_norm = [](const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  };

  TrotterReport rep;
  rep.L_lower_bound = L.lower_bound;
  rep.target_norm = spectral_norm(frame_of(target));
  for (int N : N_list) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    const double tau = T / N;
    const CMat S = oracle_expm(H, tau).to_dense();
    const CVec eL = (-tau * L.L.diagonal_entries().real()).array().exp().cast<cplx>();
    const CMat step = q.asDiagonal() * S * q.asDiagonal() * eL.asDiagonal();
    CMat prod = CMat::Identity(D, D);
    for (int k = 0; k < N; ++k) prod = step * prod;
    rep.N.push_back(N);
    rep.error.push_back(spectral_norm(frame_of(prod - target)));
  }
  for (std::size_t i = 1; i < rep.error.size(); ++i) {
    rep.ratios.push_back(rep.error[i - 1] / rep.error[i]);
  }
  if (rep.N.size() >= 2) {
    std::vector<double> nx(rep.N.begin(), rep.N.end());
    rep.fitted_order = -log_slope(nx, rep.error);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Flow and evolution

double flow_check_oracle(const Model& model, const TimeProfile& profile,
                         const RVec& P, double s, double r, double t,
                         const BasisPtr& b) {
  if (!(s < r && r < t)) throw std::invalid_argument("flow check needs s < r < t");
  const CMat St = propagator(model, profile, P, s, t, b).to_dense();
  const CMat Sr = propagator(model, profile, P, s, r, b).to_dense();
  const CMat Rt = propagator(model, profile, P, r, t, b).to_dense();
  return (St - Rt * Sr).cwiseAbs().maxCoeff();
}

FlowMcReport flow_check_mc(const Model& model, const RVec& P, double s,
                           double r, double t, const BasisPtr& b,
                           int frame_bosons, const McParams& params) {
  if (!(s < r && r < t)) throw std::invalid_argument("flow check needs s < r < t");
  const TimeProfile prof = nelson_profile(model);
  McOptions opts;
  opts.refine = true;
  McParams p1 = params, p2 = params, p3 = params;
  p2.seed = params.seed + 0x9e3779b97f4a7c15ULL;
  p3.seed = params.seed + 2 * 0x9e3779b97f4a7c15ULL;
  const McResult st = mc_semigroup(model, prof, P, s, t, b, p1, opts);
  const McResult sr = mc_semigroup(model, prof, P, s, r, b, p2, opts);
  const McResult rt = mc_semigroup(model, prof, P, r, t, b, p3, opts);

  const CMat A = rt.estimate.mean.to_dense(), B = sr.estimate.mean.to_dense();
  const CMat C = st.estimate.mean.to_dense();
  const RMat bA = 2.0 * (A - rt.refined->mean.to_dense()).cwiseAbs();
  const RMat bB = 2.0 * (B - sr.refined->mean.to_dense()).cwiseAbs();
  const RMat bC = 2.0 * (C - st.refined->mean.to_dense()).cwiseAbs();
  const RMat seA = rt.estimate.se, seB = sr.estimate.se, seC = st.estimate.se;
  const RMat absA = A.cwiseAbs(), absB = B.cwiseAbs();
  const RMat se_prod =
      (absA.cwiseAbs2() * seB.cwiseAbs2() + seA.cwiseAbs2() * absB.cwiseAbs2()).cwiseSqrt();
  const RMat budget = bC + absA * bB + bA * absB;
  const RMat tol = 3.0 * (seC.cwiseAbs2() + se_prod.cwiseAbs2()).cwiseSqrt() + budget;
  const RMat defect = (C - A * B).cwiseAbs();

  FlowMcReport rep;
  for (std::size_t i = 0; i < b->size(); ++i) {
    if (b->total(i) > frame_bosons) continue;
    for (std::size_t j = 0; j < b->size(); ++j) {
      if (b->total(j) > frame_bosons) continue;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      rep.defect = std::max(rep.defect, defect(ii, jj));
      rep.max_ratio = std::max(rep.max_ratio, defect(ii, jj) / tol(ii, jj));
    }
  }
  rep.pass = rep.max_ratio <= 1.0;
  return rep;
}

EvolutionReport evolution_check(const Model& model, const TimeProfile& profile,
                                const RVec& P, double s, double t,
                                const std::vector<double>& delta_list,
                                const BasisPtr& b) {
  if (!(t > s)) throw std::invalid_argument("evolution check needs t > s");
  const CMat St = propagator(model, profile, P, s, t, b).to_dense();
  const CMat h = build_generator(model, P, profile, t, b).dense_matrix();
  EvolutionReport rep;
  for (double d : delta_list) {
    if (!(d > 0.0)) throw std::invalid_argument("delta must be positive");
    const double step = std::min(1e-3, d / 4.0);
    const CMat Sd = propagator(model, profile, P, t, t + d, b, step).to_dense() * St;
    rep.delta.push_back(d);
    rep.residual.push_back(((Sd - St) / d + h * St).cwiseAbs().maxCoeff());
  }
  if (rep.delta.size() >= 2) rep.fitted_order = log_slope(rep.delta, rep.residual);
  return rep;
}

}  // namespace nfk
