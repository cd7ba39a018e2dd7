// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "nfk/pathint.hpp"

#include "nfk/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nfk {

CMat mode_phases(const ModeGrid& grid, const LevyPath& path) {
  if (path.X.rows() != grid.d) {
    throw std::invalid_argument("path dimension differs from the grid");
  }
  const int M = grid.size();
  const int n = grid.cells_per_axis;
  const auto nodes = path.X.cols();
  CMat ph(M, nodes);
  std::vector<cplx> axis_phase(static_cast<std::size_t>(grid.d * n));
  for (Eigen::Index j = 0; j < nodes; ++j) {
    for (int a = 0; a < grid.d; ++a) {
      const double x = path.X(a, j);
      for (int c = 0; c < n; ++c) {
        axis_phase[static_cast<std::size_t>(a * n + c)] =
            std::polar(1.0, -grid.axis_centers[c] * x);
      }
    }
    for (int i = 0; i < M; ++i) {
      cplx z = axis_phase[static_cast<std::size_t>(grid.axis(0, i))];
      for (int a = 1; a < grid.d; ++a) {
        z *= axis_phase[static_cast<std::size_t>(a * n + grid.axis(a, i))];
      }
      ph(i, j) = z;
    }
  }
  return ph;
}

RVec trapezoid_weights(const TimeGrid& grid) {
  RVec w = RVec::Constant(grid.J + 1, grid.dt());
  w[0] *= 0.5;
  w[grid.J] *= 0.5;
  return w;
}

OneBosonVector compute_U(const TimeVector& v_of_t, const ModeGrid& grid,
                         const LevyPath& path) {
  const CMat ph = mode_phases(grid, path);
  const RVec w = trapezoid_weights(path.grid);
  OneBosonVector U = OneBosonVector::Zero(grid.size());
  for (int j = 0; j <= path.grid.J; ++j) {
    const OneBosonVector v = v_of_t(path.grid.node(j));
    if (v.size() != grid.size()) throw std::invalid_argument("v has the wrong length");
    U += w[j] * ph.col(j).cwiseProduct(v);
  }
  return U;
}

cplx compute_u_double(const Kernel& alpha_minus, const Kernel& alpha_plus,
                      const ModeGrid& grid, const LevyPath& path) {
  const CMat ph = mode_phases(grid, path);
  const RVec w = trapezoid_weights(path.grid);
  const int J = path.grid.J;
  cplx u = 0.0;
  for (int j = 0; j <= J; ++j) {
    const double tj = path.grid.node(j);
    for (int l = 0; l <= J; ++l) {
      const double tl = path.grid.node(l);
      const OneBosonVector a = ph.col(j).cwiseProduct(alpha_minus(tj, tl));
      const OneBosonVector b = ph.col(l).cwiseProduct(alpha_plus(tj, tl));
      u += w[j] * w[l] * a.dot(b);  // Eigen's dot conjugates the first factor
    }
  }
  return u;
}

std::pair<Kernel, Kernel> profile_kernels(const Model& model,
                                          const TimeProfile& profile) {
  const double r = std::numbers::sqrt2 / 2.0;
  const RVec omega = model.omega;
  Kernel am = [profile, r](double tp, double) -> OneBosonVector {
    return r * profile.g_minus(tp);
  };
  Kernel ap = [profile, omega, r](double tp, double sp) -> OneBosonVector {
    const double gap = std::abs(profile.f(tp) - profile.f(sp));
    return r * (-gap * omega.array()).exp().matrix().cast<cplx>().cwiseProduct(
                   profile.g_plus(sp));
  };
  return {am, ap};
}

cplx u_single_form(const Model& model, const TimeProfile& profile,
                   const LevyPath& path) {
  const CMat ph = mode_phases(model.grid, path);
  const RVec w = trapezoid_weights(path.grid);
  const int J = path.grid.J;
  const double dt = path.grid.dt();
  cplx gamma = 0.0;
  for (int j = 1; j <= J; ++j) {
    const double tj = path.grid.node(j);
    OneBosonVector U = OneBosonVector::Zero(model.modes());
    for (int l = 0; l <= j; ++l) {
      const double tl = path.grid.node(l);
      const double wi = (l == 0 || l == j) ? 0.5 * dt : dt;
      const RVec heat = (-(profile.f(tj) - profile.f(tl)) * model.omega.array()).exp();
      U += wi * heat.cast<cplx>().cwiseProduct(ph.col(l)).cwiseProduct(profile.g_plus(tl));
    }
    const OneBosonVector left = ph.col(j).cwiseProduct(profile.g_minus(tj));
    gamma += w[j] * left.dot(U);
  }
  return std::conj(gamma);
}

PathFunctionals compute_nelson_functionals(const Model& model,
                                           const TimeProfile& profile,
                                           const LevyPath& path, bool with_U) {
  return compute_nelson_functionals(model, profile, path,
                                    mode_phases(model.grid, path), with_U);
}

PathFunctionals compute_nelson_functionals(const Model& model,
                                           const TimeProfile& profile,
                                           const LevyPath& path,
                                           const CMat& ph, bool with_U) {
  const int M = model.modes();
  const int J = path.grid.J;
  const double dt = path.grid.dt();
  const RVec w = trapezoid_weights(path.grid);
  const Eigen::ArrayXd om = model.omega.array();

  PathFunctionals out;
  out.s = path.grid.s;
  out.t = path.grid.t;
  out.dt = dt;
  const double f0 = profile.f(path.grid.s);
  out.heat_time = profile.f(path.grid.t) - f0;

  const bool fixed = profile.time_independent;
  Eigen::ArrayXcd gm = profile.g_minus(path.grid.s).array();
  Eigen::ArrayXcd gp = profile.g_plus(path.grid.s).array();
  if (gm.size() != M || gp.size() != M) {
    throw std::invalid_argument("profile vectors have the wrong length");
  }
  Eigen::ArrayXd dec;
  if (fixed) dec = (-(profile.f(path.grid.s + dt) - f0) * om).exp();

  const Eigen::ArrayXcd x0 = ph.col(0).array() * gp;
  Eigen::ArrayXcd S = x0;
  Eigen::ArrayXd E = Eigen::ArrayXd::Ones(M);  // e^{-tau(t_j) omega}
  Eigen::ArrayXcd Um, R;
  if (with_U) {
    Um = w[0] * ph.col(0).array() * gm;
    R = w[0] * x0;
  }
  cplx gamma = 0.0;
  double f_prev = f0;
  for (int j = 1; j <= J; ++j) {
    const double tj = path.grid.node(j);
    if (!fixed) {
      const double fj = profile.f(tj);
      dec = (-(fj - f_prev) * om).exp();
      f_prev = fj;
      gm = profile.g_minus(tj).array();
      gp = profile.g_plus(tj).array();
    }
    E *= dec;
    const Eigen::ArrayXcd pj = ph.col(j).array();
    const Eigen::ArrayXcd xj = pj * gp;
    S = dec * S + xj;
    const Eigen::ArrayXcd Uj = dt * (S - 0.5 * xj - 0.5 * E * x0);
    gamma += w[j] * ((pj * gm).conjugate() * Uj).sum();
    if (with_U) {
      Um += w[j] * E * pj * gm;
      R = dec * R + w[j] * xj;
    }
  }
  out.u = std::conj(gamma);
  if (with_U) {
    out.U_minus = Um.matrix();
    out.U_plus = R.matrix();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrand operator

WAssembler::WAssembler(const Model& model, BasisPtr b)
    : omega_(model.omega), table_(std::move(b)) {
  if (table_.basis()->num_modes() != model.modes()) {
    throw std::invalid_argument("basis mode count differs from the grid");
  }
}

void WAssembler::assemble(const PathFunctionals& fn, cplx c,
                          const CVec* right_phase, CMat& out) {
  if (!(fn.heat_time > 0.0)) throw std::domain_error("W needs f(t) - f(s) > 0");
  const FockBasis& B = *table_.basis();
  const auto D = static_cast<Eigen::Index>(B.size());
  out.setZero(D, D);
  const cplx scale = c * std::exp(fn.u);
  if (B.max_bosons() == 0) {
    out(0, 0) = scale * (right_phase ? (*right_phase)[0] : cplx(1.0));
    return;
  }
  if (fn.U_minus.size() != omega_.size() || fn.U_plus.size() != omega_.size()) {
    throw std::invalid_argument("W needs U^- and U^+");
  }
  const double half = 0.5 * fn.heat_time;
  table_.evaluate(half, fn.U_minus, omega_, fm_);
  table_.evaluate(half, fn.U_plus, omega_, fp_);
  std::size_t off = 0;
  for (std::size_t col = 0; col < B.size(); ++col) {
    const auto& pairs = table_.column(col);
    const std::size_t n = pairs.size();
    for (std::size_t p = 0; p < n; ++p) {
      const cplx vm = fm_[off + p];
      const auto a = static_cast<Eigen::Index>(pairs[p].row);
      for (std::size_t q = 0; q < n; ++q) {
        out(a, static_cast<Eigen::Index>(pairs[q].row)) += vm * std::conj(fp_[off + q]);
      }
    }
    off += n;
  }
  out *= scale;
  if (right_phase) {
    for (Eigen::Index k = 0; k < D; ++k) out.col(k) *= (*right_phase)[k];
  }
}

FockOperator assemble_W(const PathFunctionals& fn, const Model& model,
                        const BasisPtr& b, const std::vector<cplx>& insertions) {
  cplx c = 1.0;
  for (cplx x : insertions) c *= x;
  WAssembler wa(model, b);
  CMat out;
  wa.assemble(fn, c, nullptr, out);
  return FockOperator::dense(b, std::move(out));
}

// ---------------------------------------------------------------------------
// Estimator

std::string fingerprint(const Model& model, const TimeProfile& profile) {
  return model_to_json(model.spec).dump() + "|" + profile.name;
}

namespace {

struct Moments {
  CMat sum;
  RMat sum2;
  void reset(Eigen::Index d) {
    sum = CMat::Zero(d, d);
    sum2 = RMat::Zero(d, d);
  }
  void add(const CMat& w) {
    sum += w;
    sum2 += w.cwiseAbs2();
  }
};

SemigroupEstimate finish(const std::vector<Moments>& blocks, bool fine,
                         const std::vector<Moments>& blocks_fine,
                         const BasisPtr& b, std::size_t n) {
  const auto d = static_cast<Eigen::Index>(b->size());
  CompensatedSum<CMat> s(d, d);
  CompensatedSum<RMat> s2(d, d);
  for (const auto& m : fine ? blocks_fine : blocks) {
    s.add(m.sum);
    s2.add(m.sum2);
  }
  const double nn = static_cast<double>(n);
  const CMat mean = s.value() / nn;
  RMat var = s2.value() / nn - mean.cwiseAbs2();
  var = var.cwiseMax(0.0);
  SemigroupEstimate e;
  e.se = n > 1 ? RMat((var / (nn - 1.0)).cwiseSqrt()) : RMat::Zero(d, d);
  e.mean = FockOperator::dense(b, mean);
  e.n_paths = n;
  return e;
}

}  // namespace

McResult mc_semigroup(const Model& model, const TimeProfile& profile,
                      const RVec& P, double s, double t, const BasisPtr& b,
                      const McParams& params, const McOptions& opts) {
  if (params.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (params.block < 1) throw std::invalid_argument("block must be >= 1");
  if (P.size() != model.d()) throw std::invalid_argument("P has the wrong dimension");
  if (b->num_modes() != model.modes()) {
    throw std::invalid_argument("basis mode count differs from the grid");
  }
  const LevyProcessSpec proc = process_for(model.spec);
  const int Jf = opts.refine ? 2 * params.J : params.J;
  const TimeGrid grid(s, t, Jf);
  const auto D = static_cast<Eigen::Index>(b->size());
  const RMat K = total_momenta(*b, model.grid.momenta);
  const bool with_U = b->max_bosons() > 0;
  const double shift = std::exp((t - s) * opts.energy_shift);

  const std::size_t nb = block_count(params.n_paths, params.block);
  std::vector<Moments> acc(nb), acc_fine(opts.refine ? nb : 0);

  for_each_block(params.n_paths, params.block, params.workers, [&](BlockRange r) {
    WAssembler wa(model, b);
    CMat W;
    CVec phase(D);
    Moments& m = acc[r.index];
    m.reset(D);
    if (opts.refine) acc_fine[r.index].reset(D);

    auto one = [&](const LevyPath& path, Moments& into) {
      const CMat ph = mode_phases(model.grid, path);
      const PathFunctionals fn = compute_nelson_functionals(model, profile, path, ph, with_U);
      cplx c = shift;
      if (opts.moments) {
        for (const auto& [am, ap] : opts.moments->kernels) {
          c *= compute_u_double(am, ap, model.grid, path);
        }
      }
      const RVec dx = path.X.col(path.grid.J) - path.X.col(0);
      for (Eigen::Index k = 0; k < D; ++k) {
        phase[k] = std::polar(1.0, (P - K.col(k)).dot(dx));
      }
      wa.assemble(fn, c, &phase, W);
      into.add(W);
    };

    for (std::size_t p = r.begin; p < r.end; ++p) {
      const LevyPath path = sample_path(proc, grid, params.seed, p);
      if (opts.refine) {
        one(coarsen(path, 2), m);
        one(path, acc_fine[r.index]);
      } else {
        one(path, m);
      }
    }
  });

  auto decorate = [&](SemigroupEstimate e, int J) {
    e.seed = params.seed;
    e.J = J;
    e.s = s;
    e.t = t;
    e.P = P;
    e.fingerprint = fingerprint(model, profile);
    return e;
  };
  McResult res;
  res.estimate = decorate(finish(acc, false, acc_fine, b, params.n_paths), params.J);
  if (opts.refine) {
    res.refined = decorate(finish(acc, true, acc_fine, b, params.n_paths), Jf);
  }
  return res;
}

std::vector<SemigroupEstimate> mc_semigroup_renormalized(
    const std::vector<Model>& family, const RVec& P, double s, double t,
    int max_bosons, const McParams& params) {
  std::vector<SemigroupEstimate> out;
  out.reserve(family.size());
  for (const Model& m : family) {
    McOptions opts;
    opts.energy_shift = renorm_energy(m.spec, RenormMethod::GridSum);
    const BasisPtr b = enumerate_basis(m.modes(), max_bosons);
    out.push_back(mc_semigroup(m, nelson_profile(m), P, s, t, b, params, opts).estimate);
  }
  return out;
}

}  // namespace nfk
