// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file analysis.hpp
 * @brief Dense oracles and the verification suite built on them.
 */

#pragma once

#include "nfk/fock.hpp"
#include "nfk/model.hpp"
#include "nfk/pathint.hpp"

#include <string>
#include <vector>

namespace nfk {

/// e^{-t H} for hermitian H via eigendecomposition.
FockOperator oracle_expm(const FockOperator& H, double t);

/// e^{A} for a general square matrix (scaling and squaring Pade).
CMat expm_general(const CMat& A);

/**
 * e^{-t H(P)} computed on N_max + pad bosons and compressed to N_max.
 *
 * The Monte Carlo integrand on a truncated basis reproduces the compression
 * of the untruncated semigroup, not the exponential of the truncated H.
 */
FockOperator padded_oracle(const Model& model, const RVec& P, double t,
                           const BasisPtr& b, int pad);

/// Time-ordered propagator S_{s,t} of dS/dt = -h(t) S on the basis.
FockOperator propagator(const Model& model, const TimeProfile& profile,
                        const RVec& P, double s, double t, const BasisPtr& b,
                        double max_step = 1e-3);

/// The model restricted to the modes in theta, in the order given.
Model restrict_model(const Model& model, const std::vector<int>& theta);

// ---------------------------------------------------------------------------

struct FkReport {
  CMat estimate;         ///< J
  CMat estimate_fine;    ///< 2J on the same paths
  CMat oracle;
  RMat deviation;        ///< |estimate - oracle|
  RMat tolerance;        ///< 3 combined SE + quadrature budget
  RMat se;
  RMat budget;
  double max_ratio = 0.0;  ///< max deviation / tolerance
  double max_z = 0.0;      ///< after removing the extrapolated bias
  bool pass = false;
};

/// MC estimate at J and 2J against the padded oracle; `flip_sign` negates
/// the coupling in the estimator only.
FkReport fk_vs_oracle(const Model& model, const RVec& P, double t,
                      const BasisPtr& b, int pad, const McParams& params,
                      bool flip_sign = false);

enum class Positivity { Improving, Preserving, Neither };
const char* to_string(Positivity p);

struct PositivityReport {
  std::string fingerprint;
  double min_entry = 0.0;
  double max_imag = 0.0;
  Positivity classification = Positivity::Neither;
  double tol = 0.0;
  std::vector<double> block_minima;  ///< by row boson number
  double min_margin = 0.0;           ///< min over entries of Re S_ij + tol_ij
};

PositivityReport positivity_audit(const FockOperator& S, double tol);
/// Entrywise tolerance max(3 SE_ij, floor).
PositivityReport positivity_audit(const SemigroupEstimate& S, double floor);

struct SpectralReport {
  double E0 = 0.0;
  double gap = 0.0;
  CVec ground;
  bool perron = false;
  int iterations = 0;
};

enum class GroundMethod { Direct, Power };

/// Power iteration runs on e^{-t_power H}; t_power <= 0 picks 1 / ||H||.
SpectralReport ground_state(const FockOperator& H, double t_power = 0.0,
                            GroundMethod method = GroundMethod::Direct);

struct DispersionRow {
  RVec P;
  SpectralReport report;
};
std::vector<DispersionRow> dispersion_scan(const Model& model,
                                           const std::vector<RVec>& P_list,
                                           const BasisPtr& b,
                                           double t_power = 0.0);

struct RenormRow {
  double Lambda = 0.0;
  int cells_per_axis = 0;
  int modes = 0;
  double E_Lambda = 0.0;
  cplx vacuum;                  ///< <Omega, e^{-t (H - E_Lambda)} Omega>
  double vacuum_se = 0.0;
  double E0 = 0.0;              ///< -log(vacuum) / t + E_Lambda
  double E0_minus_ELambda = 0.0;
  double E0_minus_ELambda_se = 0.0;
};

struct RenormReport {
  std::vector<RenormRow> rows;
  std::vector<double> differences;  ///< |(E0 - E_L)(i+1) - (E0 - E_L)(i)|
  bool strictly_decreasing = false;
};

/// Cells per axis follow 2 Lambda / cell_side, so the cell size is fixed.
RenormReport renorm_scan(const ModelSpec& base,
                         const std::vector<double>& Lambda_list,
                         double cell_side, const RVec& P, double t,
                         const McParams& params);

struct TrotterReport {
  std::vector<int> N;
  std::vector<double> error;
  std::vector<double> ratios;
  double target_norm = 0.0;
  double fitted_order = 0.0;
  double L_lower_bound = 0.0;
};

/// Product (Q S_{T/N} Q e^{-(T/N) L})^N against Q (S^{theta1}(P1) x S^{theta2}(P2)) Q
/// on the frame of states with at most N_max bosons; propagators live on
/// N_max + pad bosons.
TrotterReport trotter_check(const Model& model, const RVec& P1, const RVec& P2,
                            const std::vector<int>& theta1,
                            const std::vector<int>& theta2, double T,
                            const std::vector<int>& N_list, int max_bosons,
                            int pad);

/// max-entry |S_{s,t} - S_{r,t} S_{s,r}| with oracle propagators.
double flow_check_oracle(const Model& model, const TimeProfile& profile,
                         const RVec& P, double s, double r, double t,
                         const BasisPtr& b);

struct FlowMcReport {
  double defect = 0.0;
  double max_ratio = 0.0;  ///< max defect / tolerance over the frame
  bool pass = false;
};

/// Three independent MC windows; the comparison is made on states with at
/// most `frame_bosons` bosons.
FlowMcReport flow_check_mc(const Model& model, const RVec& P, double s,
                           double r, double t, const BasisPtr& b,
                           int frame_bosons, const McParams& params);

struct EvolutionReport {
  std::vector<double> delta;
  std::vector<double> residual;
  double fitted_order = 0.0;
};

EvolutionReport evolution_check(const Model& model, const TimeProfile& profile,
                                const RVec& P, double s, double t,
                                const std::vector<double>& delta_list,
                                const BasisPtr& b);

/// Least-squares slope of log y against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nfk
