// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/analysis.hpp"
#include "nfk/pathint.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace nfk {
namespace {

ModelSpec spec_1d(double lambda) {
  ModelSpec s;
  s.d = 1;
  s.particle = {ParticleDispersion::Variant::NonRel, 0.0};
  s.boson = {BosonDispersion::Variant::Massive, 1.0};
  s.coupling = {CouplingSpec::Variant::NelsonUV, lambda, INFINITY};
  s.grid = {1.0, 2};
  return s;
}

LevyPath zero_path(const Model& m, double s, double t, int J) {
  return injected_path(process_for(m.spec), TimeGrid(s, t, J), RMat::Zero(m.d(), J + 1));
}

LevyPath smooth_path(const Model& m, double s, double t, int J) {
  const TimeGrid g(s, t, J);
  RMat X(m.d(), J + 1);
  for (int j = 0; j <= J; ++j) {
    const double r = g.node(j) - s;
    for (int a = 0; a < m.d(); ++a) X(a, j) = std::sin(1.3 * r + a) - std::sin(a);
  }
  return injected_path(process_for(m.spec), g, X);
}

double graph_norm(const OneBosonVector& f, const RVec& omega) {
  return std::sqrt(graph_norm_sq(f, omega));
}

TEST(Functionals, ComputeUExamples) {
  const Model m = resolve(spec_1d(-0.8));
  const LevyPath x0 = zero_path(m, 0.5, 2.0, 16);
  const TimeVector zero = [&](double) { return OneBosonVector(OneBosonVector::Zero(2)); };
  EXPECT_EQ(compute_U(zero, m.grid, x0).norm(), 0.0);
  const TimeVector cst = [&](double) { return m.v; };
  EXPECT_LT((compute_U(cst, m.grid, x0) - 1.5 * m.v).norm(), 1e-14);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const LevyProcessSpec proc = process_for(m.spec);
  for (int trial = 0; trial < 20; ++trial) {
    const CVec a = CVec::Random(2), b = CVec::Random(2);
    const TimeVector v = [&](double r) -> OneBosonVector { return a * std::cos(r) + b * r; };
    const LevyPath p = sample_path(proc, TimeGrid(0.0, 1.0, 32), 5, trial);
    const RVec w = trapezoid_weights(p.grid);
    double rhs = 0.0;
    for (int j = 0; j <= 32; ++j) rhs += w[j] * graph_norm(v(p.grid.node(j)), m.omega);
    EXPECT_LE(graph_norm(compute_U(v, m.grid, p), m.omega), rhs * (1 + 1e-12));
  }
}

TEST(Functionals, DoubleIntegralExamples) {
  const Model m = resolve(spec_1d(-0.8));
  const LevyPath x0 = zero_path(m, 0.0, 2.0, 8);
  const CVec am = CVec::Random(2), ap = CVec::Random(2);
  const Kernel zero = [](double, double) { return OneBosonVector(OneBosonVector::Zero(2)); };
  const Kernel km = [&](double, double) { return OneBosonVector(am); };
  const Kernel kp = [&](double, double) { return OneBosonVector(ap); };
  EXPECT_EQ(compute_u_double(zero, kp, m.grid, x0), cplx(0.0));
  EXPECT_LT(std::abs(compute_u_double(km, kp, m.grid, x0) - 4.0 * am.dot(ap)), 1e-13);
}

// Independent midpoint evaluation of the same double integral on a fine grid.
cplx midpoint_double(const Kernel& am, const Kernel& ap, const ModeGrid& grid,
                     double s, double t, int n) {
  const double h = (t - s) / n;
  auto phase = [&](double r) {
    CVec ph(grid.size());
    const double x = std::sin(1.3 * (r - s));
    for (int i = 0; i < grid.size(); ++i) ph[i] = std::polar(1.0, -grid.momenta(0, i) * x);
    return ph;
  };
  std::vector<CVec> ph(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) ph[static_cast<std::size_t>(j)] = phase(s + (j + 0.5) * h);
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double tj = s + (j + 0.5) * h;
    for (int l = 0; l < n; ++l) {
      const double tl = s + (l + 0.5) * h;
      const CVec a = ph[static_cast<std::size_t>(j)].cwiseProduct(am(tj, tl));
      const CVec b = ph[static_cast<std::size_t>(l)].cwiseProduct(ap(tj, tl));
      acc += a.dot(b);
    }
  }
  return acc * h * h;
}

TEST(Functionals, DoubleIntegralSecondOrder) {
  const Model m = resolve(spec_1d(-0.8));
  const RVec om = m.omega;
  const OneBosonVector v = m.v;
  const Kernel am = [&](double tp, double) -> OneBosonVector { return v * (1.0 + 0.3 * tp); };
  const Kernel ap = [&](double tp, double sp) -> OneBosonVector {
    return (-(tp - sp) * (tp - sp) * om.array()).exp().matrix().cast<cplx>().cwiseProduct(v);
  };
  const cplx ref = midpoint_double(am, ap, m.grid, 0.0, 1.0, 1024);
  const double e1 = std::abs(compute_u_double(am, ap, m.grid, smooth_path(m, 0.0, 1.0, 16)) - ref);
  const double e2 = std::abs(compute_u_double(am, ap, m.grid, smooth_path(m, 0.0, 1.0, 32)) - ref);
  EXPECT_GT(e1 / e2, 3.0);
  EXPECT_LT(e1 / e2, 5.0);
}

TEST(Functionals, NelsonZeroCoupling) {
  const Model m = resolve(spec_1d(0.0));
  const LevyPath p = sample_path(process_for(m.spec), TimeGrid(0.0, 1.0, 16), 1, 0);
  const PathFunctionals fn = compute_nelson_functionals(m, nelson_profile(m), p);
  EXPECT_EQ(fn.u, cplx(0.0));
  EXPECT_EQ(fn.U_minus.norm(), 0.0);
  EXPECT_EQ(fn.U_plus.norm(), 0.0);
}

TEST(Functionals, NelsonActionIsReal) {
  for (auto variant : {ParticleDispersion::Variant::NonRel, ParticleDispersion::Variant::SemiRel}) {
    ModelSpec s = spec_1d(-0.8);
    s.d = 2;
    s.particle = {variant, 1.0};
    s.grid = {1.0, 4};
    const Model m = resolve(s);
    const TimeProfile prof = nelson_profile(m);
    for (std::uint64_t i = 0; i < 100; ++i) {
      const LevyPath p = sample_path(process_for(s), TimeGrid(0.0, 1.0, 32), 9, i);
      const cplx u = compute_nelson_functionals(m, prof, p, false).u;
      ASSERT_LE(std::abs(u.imag()), 1e-10 * (1.0 + std::abs(u)));
    }
  }
}

TEST(Functionals, SingleModeClosedForm) {
  const Model m = resolve(spec_1d(-0.8));
  const double T = 1.5;
  // X = 0 makes both modes identical; each contributes v^2 / omega [T - (1 - e^{-omega T}) / omega].
  double want = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double w = m.omega[i];
    want += std::norm(m.v[i]) / w * (T - (1.0 - std::exp(-w * T)) / w);
  }
  const TimeProfile prof = nelson_profile(m);
  const cplx u1 = compute_nelson_functionals(m, prof, zero_path(m, 0.0, T, 128)).u;
  const cplx u2 = compute_nelson_functionals(m, prof, zero_path(m, 0.0, T, 256)).u;
  const double budget = 2.0 * std::abs(u1 - u2);
  EXPECT_LE(std::abs(u2 - want), budget);
  EXPECT_LT(std::abs(u2 - want), 1e-5 * want);
  EXPECT_GT(std::abs(u1 - want) / std::abs(u2 - want), 3.5);
}

TEST(Functionals, RecursionMatchesNestedSum) {
  const Model m = resolve(spec_1d(-0.8));
  for (const TimeProfile& prof : {nelson_profile(m), modulated_profile(m, 0.3, 2.0, 0.5)}) {
    for (std::uint64_t i = 0; i < 10; ++i) {
      const LevyPath p = sample_path(process_for(m.spec), TimeGrid(0.3, 1.7, 40), 2, i);
      const cplx a = compute_nelson_functionals(m, prof, p).u;
      const cplx b = u_single_form(m, prof, p);
      EXPECT_LT(std::abs(a - b), 1e-12 * (1.0 + std::abs(b)));
    }
  }
}

TEST(Functionals, SingleFormAgreesWithDoubleForm) {
  ModelSpec s = spec_1d(-0.8);
  const Model m = resolve(s);
  const TimeProfile prof = nelson_profile(m);
  const auto [am, ap] = profile_kernels(m, prof);
  // Both are second-order rules for the same integral; compare Richardson limits.
  auto single = [&](int J) { return u_single_form(m, prof, smooth_path(m, 0.0, 1.0, J)); };
  auto dbl = [&](int J) { return compute_u_double(am, ap, m.grid, smooth_path(m, 0.0, 1.0, J)); };
  const cplx rs = (4.0 * single(256) - single(128)) / 3.0;
  const cplx rd = (4.0 * dbl(256) - dbl(128)) / 3.0;
  EXPECT_LT(std::abs(rs - rd), 1e-8 * std::abs(rd));
  EXPECT_LT(std::abs(single(64) - dbl(64)), 1e-3 * std::abs(rd));
}

TEST(Functionals, QuadraticInCoupling) {
  const Model m1 = resolve(spec_1d(-0.4)), m2 = resolve(spec_1d(-0.8));
  const LevyPath p = sample_path(process_for(m1.spec), TimeGrid(0.0, 1.0, 32), 4, 0);
  const cplx u1 = compute_nelson_functionals(m1, nelson_profile(m1), p).u;
  const cplx u2 = compute_nelson_functionals(m2, nelson_profile(m2), p).u;
  EXPECT_LT(std::abs(u2 - 4.0 * u1), 1e-13 * std::abs(u2));
}

TEST(Functionals, GrowthBounds) {
  const Model m = resolve(spec_1d(-0.8));
  const TimeProfile prof = nelson_profile(m);
  const LevyProcessSpec proc = process_for(m.spec);
  const double g = graph_norm(m.v, m.omega);
  const double wmin = m.omega.minCoeff();
  for (double T : {0.25, 1.0, 4.0}) {
    const double dt = T / 32;
    // sum_j w_j e^{-tau_j omega_min} <= min(T, 1 / omega_min + dt).
    const double Cp = g * (1.0 / wmin + dt);
    const double Cm = g * std::sqrt(1.0 / wmin + dt);
    for (std::uint64_t i = 0; i < 100; ++i) {
      const PathFunctionals fn =
          compute_nelson_functionals(m, prof, sample_path(proc, TimeGrid(0.0, T, 32), 7, i));
      EXPECT_LE(graph_norm(fn.U_minus, m.omega), Cm * std::sqrt(T));
      EXPECT_LE(graph_norm(fn.U_plus, m.omega), Cp);
    }
  }
}

TEST(Integrand, FreeIsHeatSemigroup) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  PathFunctionals fn;
  fn.U_minus = OneBosonVector::Zero(2);
  fn.U_plus = OneBosonVector::Zero(2);
  fn.heat_time = 0.9;
  const CMat W = assemble_W(fn, m, b).to_dense();
  const RVec heat = (-0.9 * second_quantize_real(m.omega, *b)).array().exp();
  EXPECT_LT((W - CMat(heat.cast<cplx>().asDiagonal())).norm(), 1e-15);
  fn.heat_time = 0.0;
  EXPECT_THROW(assemble_W(fn, m, b), std::domain_error);
}

TEST(Integrand, MatchesSeriesProductAndBound) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  const TimeProfile prof = nelson_profile(m);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const LevyPath p = sample_path(process_for(m.spec), TimeGrid(0.0, 1.0, 32), 8, i);
    const PathFunctionals fn = compute_nelson_functionals(m, prof, p);
    const CMat W = assemble_W(fn, m, b).to_dense();
    // Column-by-column through the ladder-operator series.
    CMat Fm(W.rows(), W.cols()), Fp(W.rows(), W.cols());
    for (std::size_t j = 0; j < b->size(); ++j) {
      const FockVector e = FockVector::basis_state(b, j);
      Fm.col(static_cast<Eigen::Index>(j)) = apply_F(0.5, fn.U_minus, m.omega, e).coeffs;
      Fp.col(static_cast<Eigen::Index>(j)) = apply_F(0.5, fn.U_plus, m.omega, e).coeffs;
    }
    const CMat want = std::exp(fn.u) * Fm * Fp.adjoint();
    EXPECT_LT((W - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff());
    const double s = Eigen::JacobiSVD<CMat>(W).singularValues()[0];
    const double bound = std::abs(std::exp(fn.u)) *
                         std::exp(4.0 * graph_norm_sq(fn.U_minus, m.omega)) *
                         std::exp(4.0 * graph_norm_sq(fn.U_plus, m.omega));
    EXPECT_LE(s, bound);
    const cplx c(0.3, -1.1);
    const CMat Wc = assemble_W(fn, m, b, {c}).to_dense();
    EXPECT_LT((Wc - c * W).cwiseAbs().maxCoeff(), 1e-14 * W.cwiseAbs().maxCoeff());
  }
}

TEST(Integrand, NonNegativeForAttractiveCouplingOnFrozenPath) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  const PathFunctionals fn = compute_nelson_functionals(m, nelson_profile(m), zero_path(m, 0, 1, 16));
  const CMat W = assemble_W(fn, m, b).to_dense();
  EXPECT_GT(std::exp(fn.u).real(), 0.0);
  EXPECT_GE(W.real().minCoeff(), 0.0);
  EXPECT_LE(W.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Estimator, FreeVacuumMatchesSymbol) {
  const Model m = resolve(spec_1d(0.0));
  RVec P(1);
  P << 1.0;
  McParams prm;
  prm.n_paths = 100000;
  prm.J = 1;
  prm.seed = 21;
  const McResult r = mc_semigroup(m, nelson_profile(m), P, 0.0, 1.0, enumerate_basis(2, 0), prm);
  const cplx mean = r.estimate.mean.to_dense()(0, 0);
  EXPECT_LE(std::abs(mean - std::exp(-0.5)), 4.0 * r.estimate.se(0, 0));
  EXPECT_NEAR(std::exp(-0.5), 0.60653, 1e-5);
}

TEST(Estimator, FreeDiagonalMagnitudesArePathIndependent) {
  const Model m = resolve(spec_1d(0.0));
  const auto b = enumerate_basis(2, 2);
  RVec P(1);
  P << 0.4;
  const RVec heat = (-second_quantize_real(m.omega, *b)).array().exp();
  McParams prm;
  prm.n_paths = 1;
  prm.J = 8;
  for (std::uint64_t seed = 1; seed < 6; ++seed) {
    prm.seed = seed;
    const CMat W = mc_semigroup(m, nelson_profile(m), P, 0, 1, b, prm).estimate.mean.to_dense();
    for (Eigen::Index i = 0; i < W.rows(); ++i) EXPECT_NEAR(std::abs(W(i, i)), heat[i], 1e-14);
  }
}

TEST(Estimator, QuadratureBiasShrinksUnderRefinement) {
  const Model m = resolve(spec_1d(-0.8));
  const TimeProfile prof = nelson_profile(m);
  const LevyProcessSpec proc = process_for(m.spec);
  const int n = 20000;
  double s8 = 0, s16 = 0, s32 = 0;
  for (int i = 0; i < n; ++i) {
    const LevyPath fine = sample_path(proc, TimeGrid(0.0, 1.0, 32), 31, static_cast<std::uint64_t>(i));
    auto vac = [&](const LevyPath& p) {
      return std::exp(compute_nelson_functionals(m, prof, p, false).u).real();
    };
    s8 += vac(coarsen(fine, 4));
    s16 += vac(coarsen(fine, 2));
    s32 += vac(fine);
  }
  // The vacuum bias of this model contracts at close to second order.
  const double ratio = (s8 - s16) / (s16 - s32);
  EXPECT_GE(ratio, 2.5);
  EXPECT_LE(ratio, 5.5);
}

TEST(Estimator, WorkerCountInvariance) {
  const Model m = resolve(spec_1d(-0.8));
  RVec P(1);
  P << 0.7;
  McParams prm;
  prm.n_paths = 2500;
  prm.J = 16;
  prm.block = 256;
  McOptions opts;
  opts.refine = true;
  const auto b = enumerate_basis(2, 2);
  const McResult a = mc_semigroup(m, nelson_profile(m), P, 0, 1, b, prm, opts);
  for (int w : {2, 8}) {
    prm.workers = w;
    const McResult c = mc_semigroup(m, nelson_profile(m), P, 0, 1, b, prm, opts);
    EXPECT_EQ(a.estimate.mean.to_dense(), c.estimate.mean.to_dense());
    EXPECT_EQ(a.estimate.se, c.estimate.se);
    EXPECT_EQ(a.refined->mean.to_dense(), c.refined->mean.to_dense());
  }
}

TEST(Estimator, MomentInsertionScalesByFactor) {
  const Model m = resolve(spec_1d(-0.8));
  RVec P(1);
  P << 0.2;
  const auto b = enumerate_basis(2, 1);
  McParams prm;
  prm.n_paths = 50;
  prm.J = 8;
  McOptions opts;
  const Kernel one = [](double, double) { return OneBosonVector(OneBosonVector::Constant(2, 1.0)); };
  opts.moments = MomentSpec{{{one, one}}};
  const TimeProfile prof = nelson_profile(m);
  const CMat plain = mc_semigroup(m, prof, P, 0, 1, b, prm).estimate.mean.to_dense();
  const CMat ins = mc_semigroup(m, prof, P, 0, 1, b, prm, opts).estimate.mean.to_dense();
  // With unit kernels the insertion is |sum_i w e^{-i k X}|^2 per path, never larger than 4.
  EXPECT_LE(ins.cwiseAbs().maxCoeff(), 4.0 * plain.cwiseAbs().maxCoeff() + 1e-12);
  EXPECT_GT((ins - plain).norm(), 1e-6);
}

TEST(Estimator, RenormalizedSingleModelIsShiftedRun) {
  ModelSpec s = spec_1d(-0.8);
  s.coupling.Lambda = 1.0;
  const Model m = resolve(s);
  RVec P(1);
  P << 0.3;
  McParams prm;
  prm.n_paths = 200;
  prm.J = 16;
  const auto fam = mc_semigroup_renormalized({m}, P, 0.0, 1.0, 1, prm);
  McOptions opts;
  opts.energy_shift = renorm_energy(s, RenormMethod::GridSum);
  const auto direct =
      mc_semigroup(m, nelson_profile(m), P, 0.0, 1.0, enumerate_basis(2, 1), prm, opts);
  EXPECT_EQ(fam[0].mean.to_dense(), direct.estimate.mean.to_dense());
  const CMat plain = mc_semigroup(m, nelson_profile(m), P, 0.0, 1.0, enumerate_basis(2, 1), prm)
                         .estimate.mean.to_dense();
  EXPECT_LT((fam[0].mean.to_dense() - std::exp(opts.energy_shift) * plain).norm(), 1e-13);
}

}  // namespace
}  // namespace nfk
