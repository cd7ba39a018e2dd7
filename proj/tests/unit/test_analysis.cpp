// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>

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

ModelSpec spec_1d_wide(double lambda, int cells) {
  ModelSpec s = spec_1d(lambda);
  s.grid = {2.0, cells};
  return s;
}

RVec p1(double x) {
  RVec p(1);
  p << x;
  return p;
}

// Classical RK4 for dS/dt = -h(t) S, used as an independent reference.
CMat rk4_propagator(const Model& m, const TimeProfile& prof, const RVec& P,
                    double s, double t, const BasisPtr& b, int n) {
  const auto D = static_cast<Eigen::Index>(b->size());
  auto rhs = [&](double r, const CMat& S) -> CMat {
    return -build_generator(m, P, prof, r, b).dense_matrix() * S;
  };
  CMat S = CMat::Identity(D, D);
  const double h = (t - s) / n;
  for (int k = 0; k < n; ++k) {
    const double r = s + k * h;
    const CMat k1 = rhs(r, S);
    const CMat k2 = rhs(r + h / 2, S + h / 2 * k1);
    const CMat k3 = rhs(r + h / 2, S + h / 2 * k2);
    const CMat k4 = rhs(r + h, S + h * k3);
    S += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return S;
}

TEST(Oracle, DiagonalAndTwoByTwo) {
  const auto b = enumerate_basis(1, 1);
  CVec d(2);
  d << 1.0, 3.0;
  const CMat Sd = oracle_expm(FockOperator::diagonal(b, d), 0.5).to_dense();
  EXPECT_NEAR(Sd(0, 0).real(), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(Sd(1, 1).real(), std::exp(-1.5), 1e-15);

  CMat H(2, 2);
  H << 0.0, 1.0, 1.0, 0.0;
  const CMat S = oracle_expm(FockOperator::dense(b, H), 2.0).to_dense();
  EXPECT_NEAR(S(0, 0).real(), std::cosh(2.0), 1e-12);
  EXPECT_NEAR(S(0, 1).real(), -std::sinh(2.0), 1e-12);
}

TEST(Oracle, SemigroupLawAndHermiticity) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 4);
  const FockOperator H = build_hamiltonian(m, p1(0.3), b);
  const CMat a = oracle_expm(H, 0.4).to_dense(), c = oracle_expm(H, 0.7).to_dense();
  const CMat ac = oracle_expm(H, 1.1).to_dense();
  EXPECT_LT((a * c - ac).cwiseAbs().maxCoeff(), 1e-10);
  CMat N = H.dense_matrix();
  N(0, 1) += 0.5;
  EXPECT_THROW(oracle_expm(FockOperator::dense(b, N), 1.0), std::invalid_argument);
  EXPECT_THROW(oracle_expm(H, -1.0), std::domain_error);
}

TEST(Oracle, PaddedReducesToPlainWithoutPad) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  const RVec P = p1(0.7);
  const CMat plain = oracle_expm(build_hamiltonian(m, P, b), 1.0).to_dense();
  EXPECT_LT((padded_oracle(m, P, 1.0, b, 0).to_dense() - plain).norm(), 1e-13);
  const CMat padded = padded_oracle(m, P, 1.0, b, 10).to_dense();
  const CMat more = padded_oracle(m, P, 1.0, b, 14).to_dense();
  EXPECT_LT((padded - more).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(padded_oracle(m, P, 1.0, b, -1), std::invalid_argument);
}

TEST(Propagator, TimeIndependentIsExponential) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  const CMat S = propagator(m, nelson_profile(m), p1(0.0), 0.5, 1.5, b).to_dense();
  const CMat E = oracle_expm(build_hamiltonian(m, p1(0.0), b), 1.0).to_dense();
  EXPECT_LT((S - E).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(propagator(m, nelson_profile(m), p1(0.0), 1.0, 0.5, b), std::invalid_argument);
}

TEST(Propagator, ModulatedAgainstRungeKutta) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  const TimeProfile prof = modulated_profile(m, 0.5, 3.0, 0.4);
  const CMat S = propagator(m, prof, p1(0.2), 0.0, 1.0, b, 1e-2).to_dense();
  const CMat R = rk4_propagator(m, prof, p1(0.2), 0.0, 1.0, b, 4000);
  EXPECT_LT((S - R).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FeynmanKac, AgreesWithOracleAndDetectsSignFlip) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 2);
  McParams p;
  p.n_paths = 20000;
  p.J = 32;
  p.seed = 41;
  const FkReport ok = fk_vs_oracle(m, p1(0.0), 1.0, b, 10, p);
  EXPECT_TRUE(ok.pass) << ok.max_ratio;
  const FkReport bad = fk_vs_oracle(m, p1(0.0), 1.0, b, 10, p, true);
  EXPECT_FALSE(bad.pass) << bad.max_ratio;
}

TEST(Positivity, ClassificationFollowsCouplingSign) {
  const auto b = enumerate_basis(2, 3);
  auto classify = [&](double lambda) {
    const Model m = resolve(spec_1d(lambda));
    return positivity_audit(padded_oracle(m, p1(0.3), 1.0, b, 8), 1e-12).classification;
  };
  EXPECT_EQ(classify(-0.8), Positivity::Improving);
  EXPECT_EQ(classify(0.0), Positivity::Preserving);
  EXPECT_EQ(classify(0.8), Positivity::Neither);
  EXPECT_STREQ(to_string(Positivity::Improving), "improving");
}

TEST(Positivity, BlockMinimaAndMargin) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 2);
  const PositivityReport r = positivity_audit(oracle_expm(build_hamiltonian(m, p1(0.0), b), 1.0), 0.0);
  ASSERT_EQ(r.block_minima.size(), 3u);
  EXPECT_GT(r.min_entry, 0.0);
  EXPECT_DOUBLE_EQ(r.min_margin, r.min_entry);
  EXPECT_LT(r.max_imag, 1e-14);
}

TEST(Spectrum, PowerMatchesDirect) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 4);
  const FockOperator H = build_hamiltonian(m, p1(0.4), b);
  const SpectralReport d = ground_state(H);
  const SpectralReport p = ground_state(H, 0.0, GroundMethod::Power);
  EXPECT_NEAR(d.E0, p.E0, 1e-9);
  EXPECT_GT(d.gap, 0.0);
  EXPECT_TRUE(d.perron);
  EXPECT_TRUE(p.perron);
  EXPECT_LT((d.ground - p.ground).norm(), 1e-6);
  EXPECT_GT(p.iterations, 0);
}

TEST(Spectrum, FreeDispersionAndSymmetry) {
  const auto b = enumerate_basis(2, 3);
  const Model free = resolve(spec_1d(0.0));
  const auto rows0 = dispersion_scan(free, {p1(0.0), p1(0.4)}, b);
  // Free ground energy is min over occupations of Psi(P - K) + N omega.
  for (const auto& r : rows0) {
    double want = INFINITY;
    for (std::size_t i = 0; i < b->size(); ++i) {
      const Occupation& n = b->state(i);
      RVec K = RVec::Zero(1);
      double e = 0.0;
      for (int q = 0; q < 2; ++q) {
        K += n[q] * free.grid.momenta.col(q);
        e += n[q] * free.omega[q];
      }
      want = std::min(want, free.spec.particle(r.P - K) + e);
    }
    EXPECT_NEAR(r.report.E0, want, 1e-13);
  }
  const Model m = resolve(spec_1d(-0.8));
  const auto rows = dispersion_scan(m, {p1(0.6), p1(-0.6)}, b);
  EXPECT_NEAR(rows[0].report.E0, rows[1].report.E0, 1e-12);
  EXPECT_TRUE(rows[0].report.perron);
}

TEST(Renorm, ZeroCouplingIsFlat) {
  McParams p;
  p.n_paths = 200;
  p.J = 16;
  const RenormReport r = renorm_scan(spec_1d(0.0), {1.0, 2.0}, 0.5, p1(0.0), 1.0, p);
  ASSERT_EQ(r.rows.size(), 2u);
  ASSERT_EQ(r.differences.size(), 1u);
  EXPECT_LT(r.differences[0], 1e-12);
  EXPECT_EQ(r.rows[1].cells_per_axis, 8);
  EXPECT_THROW(renorm_scan(spec_1d(0.0), {1.0}, 0.3, p1(0.0), 1.0, p), std::invalid_argument);
}

TEST(Renorm, OneDimensionalChainSettles) {
  McParams p;
  p.n_paths = 2000;
  p.J = 64;
  p.seed = 7;
  const RenormReport r = renorm_scan(spec_1d(-0.5), {4.0, 8.0, 16.0}, 0.5, p1(0.0), 1.0, p);
  ASSERT_EQ(r.differences.size(), 2u);
  EXPECT_LT(r.differences.back(), 1e-2) << r.differences[0] << " " << r.differences[1];
  for (const auto& row : r.rows) EXPECT_GT(row.vacuum.real(), 0.0);
}

TEST(Trotter, SecondOrderConvergence) {
  const Model m = resolve(spec_1d_wide(-0.8, 4));
  const TrotterReport r =
      trotter_check(m, p1(0.3), p1(-0.3), {0, 1}, {2, 3}, 1.0, {4, 8, 16, 32}, 2, 2);
  ASSERT_EQ(r.ratios.size(), 3u);
  for (double q : r.ratios) {
    EXPECT_GE(q, 1.7);
    EXPECT_LE(q, 2.3);
  }
  EXPECT_NEAR(r.fitted_order, 1.0, 0.15);
  EXPECT_GT(r.target_norm, 0.0);
}

TEST(Trotter, NonRelativisticLowerBound) {
  const Model m = resolve(spec_1d_wide(-0.8, 4));
  const TrotterReport r = trotter_check(m, p1(0.0), p1(0.0), {0, 3}, {1, 2}, 1.0, {2}, 1, 1);
  EXPECT_GT(r.L_lower_bound, -10.0);
  EXPECT_TRUE(std::isfinite(r.L_lower_bound));
}

TEST(Trotter, RejectsOverlap) {
  const Model m = resolve(spec_1d_wide(-0.8, 4));
  EXPECT_THROW(trotter_check(m, p1(0.0), p1(0.0), {0, 1}, {1, 2}, 1.0, {2}, 1, 1),
               std::invalid_argument);
}

TEST(Trotter, WholeSystemIsExact) {
  const Model m = resolve(spec_1d(-0.8));
  const TrotterReport r = trotter_check(m, p1(0.4), p1(0.0), {0, 1}, {}, 1.0, {1, 4}, 2, 2);
  EXPECT_DOUBLE_EQ(r.L_lower_bound, 0.0);
  for (double e : r.error) EXPECT_LT(e, 1e-12);
}

TEST(Flow, OracleCompositionLaw) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  EXPECT_LT(flow_check_oracle(m, nelson_profile(m), p1(0.2), 0.0, 0.4, 1.0, b), 1e-10);
  EXPECT_LT(flow_check_oracle(m, modulated_profile(m, 0.5, 3.0, 0.4), p1(0.2), 0.0, 0.4, 1.0, b),
            1e-10);
  EXPECT_THROW(flow_check_oracle(m, nelson_profile(m), p1(0.0), 0.0, 1.0, 1.0, b),
               std::invalid_argument);
}

TEST(Flow, MonteCarloCompositionLaw) {
  const auto b = enumerate_basis(2, 3);
  McParams p;
  p.n_paths = 20000;
  p.J = 32;
  p.seed = 3;
  for (double lambda : {-0.5, 0.0}) {
    const FlowMcReport r = flow_check_mc(resolve(spec_1d(lambda)), p1(0.0), 0.0, 0.5, 1.0, b, 1, p);
    EXPECT_TRUE(r.pass) << "lambda=" << lambda << " ratio=" << r.max_ratio;
  }
}

TEST(Evolution, FirstOrderResidual) {
  const Model m = resolve(spec_1d(-0.8));
  const auto b = enumerate_basis(2, 3);
  const EvolutionReport r = evolution_check(m, modulated_profile(m, 0.5, 3.0, 0.4), p1(0.2),
                                            0.0, 0.7, {1e-2, 5e-3, 2.5e-3}, b);
  EXPECT_GE(r.fitted_order, 0.9);
  EXPECT_LE(r.fitted_order, 1.1);
  EXPECT_EQ((propagator(m, nelson_profile(m), p1(0.0), 0.3, 0.3, b).to_dense() -
             CMat::Identity(10, 10)).norm(), 0.0);
}

}  // namespace
}  // namespace nfk
