// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nfk {

namespace {

// Compositions of `remaining` into the tail of `cur`, first entry largest.
void compose_desc(int pos, int remaining, Occupation& cur,
                  std::vector<Occupation>& out) {
  const int m = static_cast<int>(cur.size());
  if (pos == m - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    compose_desc(pos + 1, remaining - k, cur, out);
  }
  cur[pos] = 0;
}

void require_same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (!a || !b || !(*a == *b)) {
    throw std::invalid_argument("basis mismatch");
  }
}

void require_modes(const OneBosonVector& f, const FockBasis& b) {
  if (f.size() != b.num_modes()) {
    throw std::invalid_argument("one-boson vector length " +
                                std::to_string(f.size()) + " != modes " +
                                std::to_string(b.num_modes()));
  }
}

double lfact(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

double basis_dimension(int num_modes, int max_bosons) {
  // binomial(M + N, N) in floating point.
  double r = 1.0;
  for (int i = 1; i <= max_bosons; ++i) {
    r = r * static_cast<double>(num_modes + i) / static_cast<double>(i);
  }
  return r;
}

FockBasis::FockBasis(int num_modes, int max_bosons, std::size_t cap)
    : num_modes_(num_modes), max_bosons_(max_bosons) {
  if (num_modes < 1) throw std::invalid_argument("num_modes must be >= 1");
  if (max_bosons < 0) throw std::invalid_argument("max_bosons must be >= 0");
  if (basis_dimension(num_modes, max_bosons) > static_cast<double>(cap)) {
    throw std::length_error("basis too large");
  }
  Occupation cur(num_modes, 0);
  for (int n = 0; n <= max_bosons; ++n) {
    compose_desc(0, n, cur, states_);
  }
  totals_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    int tot = 0;
    for (int x : states_[i]) tot += x;
    totals_.push_back(tot);
    index_.emplace(states_[i], i);
  }
  const std::size_t d = states_.size();
  lowered_.assign(d * num_modes_, kNoState);
  raised_.assign(d * num_modes_, kNoState);
  for (std::size_t i = 0; i < d; ++i) {
    Occupation n = states_[i];
    for (int q = 0; q < num_modes_; ++q) {
      if (n[q] > 0) {
        --n[q];
        lowered_[i * num_modes_ + q] = index_.at(n);
        ++n[q];
      }
      if (totals_[i] < max_bosons_) {
        ++n[q];
        raised_[i * num_modes_ + q] = index_.at(n);
        --n[q];
      }
    }
  }
}

std::size_t FockBasis::index_of(const Occupation& n) const {
  auto it = index_.find(n);
  return it == index_.end() ? kNoState : it->second;
}

BasisPtr enumerate_basis(int num_modes, int max_bosons, std::size_t cap) {
  return std::make_shared<const FockBasis>(num_modes, max_bosons, cap);
}

FockVector FockVector::zero(BasisPtr b) {
  const auto n = static_cast<Eigen::Index>(b->size());
  return FockVector{std::move(b), CVec::Zero(n)};
}

FockVector FockVector::vacuum(BasisPtr b) {
  FockVector v = zero(std::move(b));
  v.coeffs[0] = 1.0;
  return v;
}

FockVector FockVector::basis_state(BasisPtr b, std::size_t i) {
  FockVector v = zero(std::move(b));
  v.coeffs[static_cast<Eigen::Index>(i)] = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// FockOperator

FockOperator FockOperator::dense(BasisPtr b, CMat m, bool hermitian_hint) {
  const auto d = static_cast<Eigen::Index>(b->size());
  if (m.rows() != d || m.cols() != d) {
    throw std::invalid_argument("operator shape does not match basis");
  }
  FockOperator op;
  op.basis_ = std::move(b);
  op.storage_ = Storage::Dense;
  op.dense_ = std::move(m);
  if (hermitian_hint) {
    op.hermitian_ = is_hermitian(op.dense_);
  } else {
    op.refresh_hermitian_flag();
  }
  return op;
}

FockOperator FockOperator::diagonal(BasisPtr b, CVec d) {
  if (d.size() != static_cast<Eigen::Index>(b->size())) {
    throw std::invalid_argument("diagonal length does not match basis");
  }
  FockOperator op;
  op.basis_ = std::move(b);
  op.storage_ = Storage::Diagonal;
  op.diag_ = std::move(d);
  op.refresh_hermitian_flag();
  return op;
}

void FockOperator::refresh_hermitian_flag() {
  if (storage_ == Storage::Diagonal) {
    const double scale = diag_.size() ? diag_.cwiseAbs().maxCoeff() : 0.0;
    hermitian_ = diag_.size() == 0 ||
                 diag_.imag().cwiseAbs().maxCoeff() <= 1e-12 * scale;
  } else {
    hermitian_ = is_hermitian(dense_);
  }
}

CMat FockOperator::to_dense() const {
  if (storage_ == Storage::Dense) return dense_;
  return diag_.asDiagonal();
}

FockVector FockOperator::apply(const FockVector& psi) const {
  require_same_basis(basis_, psi.basis);
  if (storage_ == Storage::Diagonal) {
    return FockVector{basis_, diag_.cwiseProduct(psi.coeffs)};
  }
  return FockVector{basis_, dense_ * psi.coeffs};
}

FockOperator FockOperator::operator*(const FockOperator& rhs) const {
  require_same_basis(basis_, rhs.basis_);
  if (is_diagonal() && rhs.is_diagonal()) {
    return diagonal(basis_, diag_.cwiseProduct(rhs.diag_));
  }
  if (is_diagonal()) return dense(basis_, diag_.asDiagonal() * rhs.dense_);
  if (rhs.is_diagonal()) return dense(basis_, dense_ * rhs.diag_.asDiagonal());
  return dense(basis_, dense_ * rhs.dense_);
}

FockOperator FockOperator::operator+(const FockOperator& rhs) const {
  require_same_basis(basis_, rhs.basis_);
  if (is_diagonal() && rhs.is_diagonal()) {
    return diagonal(basis_, diag_ + rhs.diag_);
  }
  return dense(basis_, to_dense() + rhs.to_dense());
}

FockOperator FockOperator::adjoint() const {
  if (is_diagonal()) return diagonal(basis_, diag_.conjugate());
  return dense(basis_, dense_.adjoint());
}

bool is_hermitian(const CMat& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = a.cwiseAbs().maxCoeff();
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  return dev <= rel_tol * scale;
}

double graph_norm_sq(const OneBosonVector& f, const RVec& omega) {
  if (f.size() != omega.size()) {
    throw std::invalid_argument("omega length mismatch");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double a2 = std::norm(f[i]);
    if (a2 == 0.0) continue;
    if (!(omega[i] > 0.0)) {
      throw std::domain_error("graph norm needs omega > 0 on the support");
    }
    s += a2 * (1.0 + 1.0 / omega[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Ladder operators

FockVector annihilate(const OneBosonVector& f, const FockVector& psi) {
  const FockBasis& b = *psi.basis;
  require_modes(f, b);
  FockVector out = FockVector::zero(psi.basis);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const cplx c = psi.coeffs[static_cast<Eigen::Index>(i)];
    if (c == cplx(0.0)) continue;
    const Occupation& n = b.state(i);
    for (int q = 0; q < b.num_modes(); ++q) {
      if (n[q] == 0) continue;
      const std::size_t j = b.lowered(i, q);
      out.coeffs[static_cast<Eigen::Index>(j)] +=
          std::conj(f[q]) * std::sqrt(static_cast<double>(n[q])) * c;
    }
  }
  return out;
}

FockVector create(const OneBosonVector& f, const FockVector& psi) {
  const FockBasis& b = *psi.basis;
  require_modes(f, b);
  FockVector out = FockVector::zero(psi.basis);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const cplx c = psi.coeffs[static_cast<Eigen::Index>(i)];
    if (c == cplx(0.0)) continue;
    const Occupation& n = b.state(i);
    for (int q = 0; q < b.num_modes(); ++q) {
      const std::size_t j = b.raised(i, q);
      if (j == kNoState) continue;
      out.coeffs[static_cast<Eigen::Index>(j)] +=
          f[q] * std::sqrt(static_cast<double>(n[q] + 1)) * c;
    }
  }
  return out;
}

FockOperator annihilation_matrix(const OneBosonVector& f, const BasisPtr& b) {
  require_modes(f, *b);
  const auto d = static_cast<Eigen::Index>(b->size());
  CMat m = CMat::Zero(d, d);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const Occupation& n = b->state(i);
    for (int q = 0; q < b->num_modes(); ++q) {
      if (n[q] == 0) continue;
      const auto j = static_cast<Eigen::Index>(b->lowered(i, q));
      m(j, static_cast<Eigen::Index>(i)) +=
          std::conj(f[q]) * std::sqrt(static_cast<double>(n[q]));
    }
  }
  return FockOperator::dense(b, std::move(m));
}

FockOperator creation_matrix(const OneBosonVector& f, const BasisPtr& b) {
  require_modes(f, *b);
  const auto d = static_cast<Eigen::Index>(b->size());
  CMat m = CMat::Zero(d, d);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const Occupation& n = b->state(i);
    for (int q = 0; q < b->num_modes(); ++q) {
      const std::size_t j = b->raised(i, q);
      if (j == kNoState) continue;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) +=
          f[q] * std::sqrt(static_cast<double>(n[q] + 1));
    }
  }
  return FockOperator::dense(b, std::move(m));
}

RVec second_quantize_real(const RVec& m, const FockBasis& b) {
  if (m.size() != b.num_modes()) {
    throw std::invalid_argument("dGamma symbol length mismatch");
  }
  RVec d(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Occupation& n = b.state(i);
    double s = 0.0;
    for (int q = 0; q < b.num_modes(); ++q) s += n[q] * m[q];
    d[static_cast<Eigen::Index>(i)] = s;
  }
  return d;
}

FockOperator second_quantize(const CVec& m, const BasisPtr& b) {
  if (m.size() != b->num_modes()) {
    throw std::invalid_argument("dGamma symbol length mismatch");
  }
  CVec d(static_cast<Eigen::Index>(b->size()));
  for (std::size_t i = 0; i < b->size(); ++i) {
    const Occupation& n = b->state(i);
    cplx s = 0.0;
    for (int q = 0; q < b->num_modes(); ++q) s += static_cast<double>(n[q]) * m[q];
    d[static_cast<Eigen::Index>(i)] = s;
  }
  return FockOperator::diagonal(b, std::move(d));
}

FockOperator field_op(const OneBosonVector& f, const BasisPtr& b) {
  CMat m = annihilation_matrix(f, b).dense_matrix() +
           creation_matrix(f, b).dense_matrix();
  return FockOperator::dense(b, std::move(m));
}

// ---------------------------------------------------------------------------
// F_t^omega

FockVector apply_F(double t, const OneBosonVector& f, const RVec& omega,
                   const FockVector& psi) {
  if (!(t > 0.0)) throw std::domain_error("apply_F needs t > 0");
  const FockBasis& b = *psi.basis;
  require_modes(f, b);
  const RVec heat = (-t * second_quantize_real(omega, b)).array().exp();
  FockVector term{psi.basis, heat.cast<cplx>().cwiseProduct(psi.coeffs)};
  FockVector out = term;
  for (int n = 1; n <= b.max_bosons(); ++n) {
    term = create(f, term);
    term.coeffs /= static_cast<double>(n);
    out.coeffs += term.coeffs;
  }
  return out;
}

FockOperator F_matrix(double t, const OneBosonVector& f, const RVec& omega,
                      const BasisPtr& b) {
  if (!(t > 0.0)) throw std::domain_error("F_matrix needs t > 0");
  FSeriesTable table(b);
  return FockOperator::dense(b, table.dense(t, f, omega));
}

FSeriesTable::FSeriesTable(BasisPtr b) : basis_(std::move(b)) {
  const FockBasis& B = *basis_;
  const int m = B.num_modes();
  cols_.resize(B.size());
  for (std::size_t a = 0; a < B.size(); ++a) {
    const Occupation& na = B.state(a);
    // Enumerate all c <= a componentwise.
    Occupation nc(m, 0);
    for (;;) {
      const std::size_t c = B.index_of(nc);
      Pair p;
      p.row = a;
      double lc = 0.0;
      for (int q = 0; q < m; ++q) {
        const int mq = na[q] - nc[q];
        lc += 0.5 * (lfact(na[q]) - lfact(nc[q])) - lfact(mq);
        if (mq > 0) p.pw.emplace_back(q, mq);
      }
      p.comb = std::exp(lc);
      cols_[c].push_back(std::move(p));
      ++num_pairs_;
      int q = 0;
      while (q < m && nc[q] == na[q]) {
        nc[q] = 0;
        ++q;
      }
      if (q == m) break;
      ++nc[q];
    }
  }
}

void FSeriesTable::evaluate(double t, const OneBosonVector& f,
                            const RVec& omega, std::vector<cplx>& out) const {
  const FockBasis& B = *basis_;
  out.resize(num_pairs_);
  std::size_t k = 0;
  for (std::size_t c = 0; c < B.size(); ++c) {
    const Occupation& nc = B.state(c);
    double e = 0.0;
    for (int q = 0; q < B.num_modes(); ++q) e += nc[q] * omega[q];
    const double heat = std::exp(-t * e);
    for (const Pair& p : cols_[c]) {
      cplx v = p.comb * heat;
      for (const auto& [q, mq] : p.pw) {
        cplx fq = f[q];
        for (int r = 0; r < mq; ++r) v *= fq;
      }
      out[k++] = v;
    }
  }
}

CMat FSeriesTable::dense(double t, const OneBosonVector& f,
                         const RVec& omega) const {
  require_modes(f, *basis_);
  std::vector<cplx> vals;
  evaluate(t, f, omega, vals);
  const auto d = static_cast<Eigen::Index>(basis_->size());
  CMat m = CMat::Zero(d, d);
  std::size_t k = 0;
  for (std::size_t c = 0; c < basis_->size(); ++c) {
    for (const Pair& p : cols_[c]) {
      m(static_cast<Eigen::Index>(p.row), static_cast<Eigen::Index>(c)) =
          vals[k++];
    }
  }
  return m;
}

FockVector exponential_vector(const OneBosonVector& h, const BasisPtr& b) {
  require_modes(h, *b);
  FockVector out = FockVector::zero(b);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const Occupation& n = b->state(i);
    cplx c = 1.0;
    double lf = 0.0;
    for (int q = 0; q < b->num_modes(); ++q) {
      for (int r = 0; r < n[q]; ++r) c *= h[q];
      lf += lfact(n[q]);
    }
    out.coeffs[static_cast<Eigen::Index>(i)] = c * std::exp(-0.5 * lf);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Momentum phases, restrictions, cone

RMat total_momenta(const FockBasis& b, const RMat& momenta) {
  if (momenta.cols() != b.num_modes()) {
    throw std::invalid_argument("momenta must be d x M");
  }
  RMat K = RMat::Zero(momenta.rows(), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Occupation& n = b.state(i);
    for (int q = 0; q < b.num_modes(); ++q) {
      if (n[q]) K.col(static_cast<Eigen::Index>(i)) += n[q] * momenta.col(q);
    }
  }
  return K;
}

FockOperator phase_translate(const RVec& P, const RVec& x, const BasisPtr& b,
                             const RMat& momenta) {
  if (P.size() != momenta.rows() || x.size() != momenta.rows()) {
    throw std::invalid_argument("P and x must have the grid dimension");
  }
  const RMat K = total_momenta(*b, momenta);
  CVec d(static_cast<Eigen::Index>(b->size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d[i] = std::polar(1.0, (P - K.col(i)).dot(x));
  }
  return FockOperator::diagonal(b, std::move(d));
}

std::vector<bool> q_mask(const std::vector<int>& theta, const FockBasis& b) {
  std::vector<bool> in(b.num_modes(), false);
  for (int q : theta) {
    if (q < 0 || q >= b.num_modes()) {
      throw std::out_of_range("theta contains an invalid mode index");
    }
    in[q] = true;
  }
  std::vector<bool> keep(b.size(), true);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Occupation& n = b.state(i);
    for (int q = 0; q < b.num_modes(); ++q) {
      if (n[q] > 0 && !in[q]) {
        keep[i] = false;
        break;
      }
    }
  }
  return keep;
}

FockOperator restrict_Q_operator(const std::vector<int>& theta,
                                 const BasisPtr& b) {
  const auto keep = q_mask(theta, *b);
  CVec d(static_cast<Eigen::Index>(b->size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    d[static_cast<Eigen::Index>(i)] = keep[i] ? 1.0 : 0.0;
  }
  return FockOperator::diagonal(b, std::move(d));
}

FockVector restrict_Q(const std::vector<int>& theta, const FockVector& psi) {
  const auto keep = q_mask(theta, *psi.basis);
  FockVector out = psi;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) out.coeffs[static_cast<Eigen::Index>(i)] = 0.0;
  }
  return out;
}

const char* to_string(Cone c) {
  switch (c) {
    case Cone::StrictlyPositive: return "strictly_positive";
    case Cone::NonNegative: return "non_negative";
    case Cone::Outside: return "outside";
  }
  return "?";
}

Cone cone_check(const CVec& coeffs, double tol) {
  bool strict = true;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const cplx c = coeffs[i];
    if (std::abs(c.imag()) > tol || c.real() < -tol) return Cone::Outside;
    if (!(c.real() > tol)) strict = false;
  }
  return strict ? Cone::StrictlyPositive : Cone::NonNegative;
}

Cone cone_check(const FockVector& psi, double tol) {
  return cone_check(psi.coeffs, tol);
}

std::vector<std::size_t> embed_indices(const FockBasis& small,
                                       const FockBasis& big) {
  if (small.num_modes() != big.num_modes() ||
      small.max_bosons() > big.max_bosons()) {
    throw std::invalid_argument("cannot embed basis");
  }
  std::vector<std::size_t> idx(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) {
    idx[i] = big.index_of(small.state(i));
  }
  return idx;
}

}  // namespace nfk
