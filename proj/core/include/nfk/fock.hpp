// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fock.hpp
 * @brief Truncated bosonic Fock space over a finite set of momentum modes.
 *
 * States are occupation vectors n = (n_1, ..., n_M) with total <= N_max,
 * stored in graded-lex order: by total boson number, then lexicographically
 * descending within each total, so (1,0) precedes (0,1).
 */

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace nfk {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Coefficients f(k_i) * sqrt(w_i) on the mode grid.
using OneBosonVector = CVec;

using Occupation = std::vector<int>;

inline constexpr std::size_t kDefaultBasisCap = 200000;
inline constexpr std::size_t kNoState = static_cast<std::size_t>(-1);

class FockBasis {
 public:
  FockBasis(int num_modes, int max_bosons, std::size_t cap = kDefaultBasisCap);

  int num_modes() const { return num_modes_; }
  int max_bosons() const { return max_bosons_; }
  std::size_t size() const { return states_.size(); }

  const Occupation& state(std::size_t i) const { return states_[i]; }
  int total(std::size_t i) const { return totals_[i]; }

  /// Index of an occupation vector, or kNoState.
  std::size_t index_of(const Occupation& n) const;

  /// Index after removing one boson from `mode`; kNoState if n_mode == 0.
  std::size_t lowered(std::size_t i, int mode) const {
    return lowered_[i * num_modes_ + mode];
  }
  /// Index after adding one boson to `mode`; kNoState above N_max.
  std::size_t raised(std::size_t i, int mode) const {
    return raised_[i * num_modes_ + mode];
  }

  bool operator==(const FockBasis& o) const {
    return num_modes_ == o.num_modes_ && max_bosons_ == o.max_bosons_;
  }

 private:
  int num_modes_;
  int max_bosons_;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::map<Occupation, std::size_t> index_;
  std::vector<std::size_t> lowered_;
  std::vector<std::size_t> raised_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

/// Throws std::length_error("basis too large") above `cap`.
BasisPtr enumerate_basis(int num_modes, int max_bosons,
                         std::size_t cap = kDefaultBasisCap);

/// binomial(M + N, M) without overflow for desk-scale inputs.
double basis_dimension(int num_modes, int max_bosons);

struct FockVector {
  BasisPtr basis;
  CVec coeffs;

  static FockVector zero(BasisPtr b);
  static FockVector vacuum(BasisPtr b);
  static FockVector basis_state(BasisPtr b, std::size_t i);
};

class FockOperator {
 public:
  enum class Storage { Dense, Diagonal };

  FockOperator() = default;
  static FockOperator dense(BasisPtr b, CMat m, bool hermitian_hint = false);
  static FockOperator diagonal(BasisPtr b, CVec d);

  const BasisPtr& basis() const { return basis_; }
  Storage storage() const { return storage_; }
  bool is_diagonal() const { return storage_ == Storage::Diagonal; }
  bool hermitian() const { return hermitian_; }
  std::size_t dim() const { return basis_ ? basis_->size() : 0; }

  const CMat& dense_matrix() const { return dense_; }
  const CVec& diagonal_entries() const { return diag_; }
  CMat to_dense() const;

  FockVector apply(const FockVector& psi) const;
  FockOperator operator*(const FockOperator& rhs) const;
  FockOperator operator+(const FockOperator& rhs) const;
  FockOperator adjoint() const;

 private:
  void refresh_hermitian_flag();

  BasisPtr basis_;
  Storage storage_ = Storage::Dense;
  CMat dense_;
  CVec diag_;
  bool hermitian_ = false;
};

/// max |A - A^dagger| <= 1e-12 * max |A|.
bool is_hermitian(const CMat& a, double rel_tol = 1e-12);

/// ||f||_omega^2 = ||f||^2 + ||omega^{-1/2} f||^2.
double graph_norm_sq(const OneBosonVector& f, const RVec& omega);

FockVector annihilate(const OneBosonVector& f, const FockVector& psi);
FockVector create(const OneBosonVector& f, const FockVector& psi);
FockOperator annihilation_matrix(const OneBosonVector& f, const BasisPtr& b);
FockOperator creation_matrix(const OneBosonVector& f, const BasisPtr& b);

/// dGamma(m): diagonal with entry sum_i n_i m_i.
FockOperator second_quantize(const CVec& m, const BasisPtr& b);
RVec second_quantize_real(const RVec& m, const FockBasis& b);

/// phi(f) = a(f) + a^dagger(f).
FockOperator field_op(const OneBosonVector& f, const BasisPtr& b);

/// F_t^omega(f) psi = sum_{n <= N_max} a^dagger(f)^n / n! e^{-t dGamma(omega)} psi.
FockVector apply_F(double t, const OneBosonVector& f, const RVec& omega,
                   const FockVector& psi);
FockOperator F_matrix(double t, const OneBosonVector& f, const RVec& omega,
                      const BasisPtr& b);

/**
 * Sparse closed form of F_t^omega(f).
 *
 * Entry (a, c) is nonzero only when a >= c componentwise and equals
 * e^{-t dGamma(omega)_c} prod_i f_i^{m_i} / m_i! sqrt(a_i! / c_i!), m = a - c.
 */
class FSeriesTable {
 public:
  struct Pair {
    std::size_t row;                       // a
    double comb;                           // prod sqrt(a_i!/c_i!) / m_i!
    std::vector<std::pair<int, int>> pw;   // (mode, m_i) with m_i > 0
  };

  explicit FSeriesTable(BasisPtr b);

  const BasisPtr& basis() const { return basis_; }
  /// Pairs (a, c) grouped by column c.
  const std::vector<Pair>& column(std::size_t c) const { return cols_[c]; }
  std::size_t num_pairs() const { return num_pairs_; }

  /// Values F_{a,c} laid out as in column(c), concatenated over c.
  void evaluate(double t, const OneBosonVector& f, const RVec& omega,
                std::vector<cplx>& out) const;
  CMat dense(double t, const OneBosonVector& f, const RVec& omega) const;

 private:
  BasisPtr basis_;
  std::vector<std::vector<Pair>> cols_;
  std::size_t num_pairs_ = 0;
};

/// Coefficient prod_i h_i^{n_i} / sqrt(n_i!), truncated at N_max.
FockVector exponential_vector(const OneBosonVector& h, const BasisPtr& b);

/// Total momentum K_n = sum_i n_i k_i per state, as a d x D matrix.
RMat total_momenta(const FockBasis& b, const RMat& momenta);

/// Diagonal e^{i (P - K_n) . x}; `momenta` is d x M.
FockOperator phase_translate(const RVec& P, const RVec& x, const BasisPtr& b,
                             const RMat& momenta);

/// Mask of states whose occupied modes all lie in theta.
std::vector<bool> q_mask(const std::vector<int>& theta, const FockBasis& b);
FockOperator restrict_Q_operator(const std::vector<int>& theta,
                                 const BasisPtr& b);
FockVector restrict_Q(const std::vector<int>& theta, const FockVector& psi);

enum class Cone { StrictlyPositive, NonNegative, Outside };
const char* to_string(Cone c);
Cone cone_check(const FockVector& psi, double tol);
Cone cone_check(const CVec& coeffs, double tol);

/// Positions of `small` states inside `big` (same M, smaller N_max).
std::vector<std::size_t> embed_indices(const FockBasis& small,
                                       const FockBasis& big);

}  // namespace nfk
