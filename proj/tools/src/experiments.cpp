// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "experiments.hpp"

#include "nfk/analysis.hpp"
#include "nfk/levy.hpp"
#include "nfk/pathint.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace nfk::cli {

namespace {

// Dense work keeps a handful of D x D complex matrices alive.
constexpr double kMemoryLimitBytes = 4.0 * 1024 * 1024 * 1024;

BasisPtr checked_basis(int modes, int max_bosons, const std::string& field) {
  if (max_bosons < 0) throw ConfigError(field + ": must be >= 0");
  const double D = basis_dimension(modes, max_bosons);
  if (D > static_cast<double>(kDefaultBasisCap)) {
    throw ConfigError(field + ": basis too large (dimension " + fmt(D) + ")");
  }
  if (6.0 * 16.0 * D * D > kMemoryLimitBytes) {
    throw ConfigError(field + ": memory estimate exceeds limit (dimension " + fmt(D) + ")");
  }
  return enumerate_basis(modes, max_bosons);
}

json vec_json(const RVec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json estimate_json(const SemigroupEstimate& e) {
  return {{"n_paths", e.n_paths}, {"seed", e.seed},   {"J", e.J},
          {"s", e.s},             {"t", e.t},         {"P", vec_json(e.P)},
          {"fingerprint", e.fingerprint}};
}

McParams mc_params(Params& p, const RunContext& ctx, std::size_t n_default, int J_default) {
  McParams m;
  m.n_paths = p.count("n_paths", n_default);
  m.J = p.integer("J", J_default);
  if (m.J < 1) throw ConfigError(p.field("J") + ": must be >= 1");
  m.seed = ctx.seed;
  m.workers = ctx.workers;
  return m;
}

RVec zero(int d) { return RVec::Zero(d); }

std::vector<int> checked_theta(Params& p, const char* key, int modes) {
  const std::vector<int> theta = p.integers(key);
  std::set<int> seen;
  for (int q : theta) {
    if (q < 0 || q >= modes) {
      throw ConfigError(p.field(key) + ": mode " + std::to_string(q) + " out of range");
    }
    if (!seen.insert(q).second) {
      throw ConfigError(p.field(key) + ": mode " + std::to_string(q) + " repeated");
    }
  }
  return theta;
}

// ---------------------------------------------------------------------------

RunOutput validate_levy(const ModelSpec& spec, Params& p, const RunContext& ctx) {
  const int d = spec.d;
  RVec e1 = zero(d);
  e1[0] = 1.0;
  const std::vector<RVec> ks =
      p.vectors("k", d, std::vector<RVec>{0.25 * e1, 0.5 * e1, e1, 1.5 * e1, 2.0 * e1});
  const std::vector<double> times = p.numbers("times", std::vector<double>{0.5, 1.0, 2.0});
  const std::size_t n = p.count("n_paths", 100000);
  const double z_max = p.number("z_max", 4.0);
  const RVec k1 = p.vector("k1", d, RVec(0.8 * e1)), k2 = p.vector("k2", d, RVec(-1.1 * e1));
  const double t1 = p.number("t1", 0.7), t2 = p.number("t2", 1.6);
  p.finish();
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError(p.field("times") + ": times must be positive");
  }
  if (!(0.0 < t1 && t1 < t2)) throw ConfigError(p.field("t1") + ": needs 0 < t1 < t2");

  const LevyProcessSpec proc = process_for(spec);
  RunOutput out;
  Table tab{"char_test", {"kind", "k", "time", "mean_re", "mean_im", "se", "target", "z"}, {}};
  auto kstr = [](const RVec& k) {
    std::string s;
    for (Eigen::Index i = 0; i < k.size(); ++i) s += (i ? " " : "") + fmt(k[i]);
    return s;
  };
  double zmax = 0.0;
  std::uint64_t seed = ctx.seed;
  for (const RVec& k : ks) {
    for (const auto& r : empirical_char_test(proc, k, times, n, seed++)) {
      tab.rows.push_back({"single", kstr(k), fmt(r.time), fmt(r.mean.real()), fmt(r.mean.imag()),
                          fmt(r.se), fmt(r.target), fmt(r.z)});
      zmax = std::max(zmax, r.z);
    }
  }
  const CharTestRow tt = two_time_test(proc, k1, k2, t1, t2, n, seed++);
  tab.rows.push_back({"two_time", kstr(k1) + " | " + kstr(k2), fmt(t1) + " | " + fmt(t2),
                      fmt(tt.mean.real()), fmt(tt.mean.imag()), fmt(tt.se), fmt(tt.target),
                      fmt(tt.z)});
  zmax = std::max(zmax, tt.z);
  out.result["max_z"] = zmax;
  out.result["z_max"] = z_max;
  if (proc.variant == LevyProcessSpec::Variant::RelativisticSR && proc.M > 0.0) {
    const ScalarTest m = ig_mean_test(proc.M, 1.0, n, seed++);
    const ScalarTest l = ig_laplace_test(proc.M, 1.0, 1.0, n, seed++);
    out.result["ig_mean"] = {{"mean", m.mean}, {"se", m.se}, {"target", m.target}, {"z", m.z}};
    out.result["ig_laplace"] = {{"mean", l.mean}, {"se", l.se}, {"target", l.target}, {"z", l.z}};
    zmax = std::max({zmax, m.z, l.z});
  }
  out.pass = zmax <= z_max;
  out.tables.push_back(std::move(tab));
  return out;
}

RunOutput build_hamiltonian_run(const ModelSpec& spec, Params& p, const RunContext&) {
  const RVec P = p.vector("P", spec.d, zero(spec.d));
  const int N = p.integer("max_bosons", 2);
  p.finish();
  const Model m = resolve(spec);
  const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
  const FockOperator H = build_hamiltonian(m, P, b);
  const SpectralReport g = ground_state(H);
  RunOutput out;
  out.result = {{"modes", m.modes()}, {"dimension", b->size()}, {"hermitian", H.hermitian()},
                {"E0", g.E0},         {"gap", g.gap},          {"perron", g.perron},
                {"P", vec_json(P)}};
  add_complex_matrix(out.tables, "hamiltonian", H.to_dense());
  Table modes{"modes", {"mode", "omega", "v_re", "v_im", "weight"}, {}};
  for (int a = 0; a < spec.d; ++a) modes.header.push_back("k" + std::to_string(a));
  for (int q = 0; q < m.modes(); ++q) {
    std::vector<std::string> row{std::to_string(q), fmt(m.omega[q]), fmt(m.v[q].real()),
                                 fmt(m.v[q].imag()), fmt(m.grid.weights[q])};
    for (int a = 0; a < spec.d; ++a) row.push_back(fmt(m.grid.momenta(a, q)));
    modes.rows.push_back(std::move(row));
  }
  out.tables.push_back(std::move(modes));
  out.tables.push_back(basis_legend(*b));
  return out;
}

RunOutput mc_run(const ModelSpec& spec, Params& p, const RunContext& ctx) {
  const RVec P = p.vector("P", spec.d, zero(spec.d));
  const double s = p.number("s", 0.0), t = p.number("t", 1.0);
  const int N = p.integer("max_bosons", 2);
  const bool refine = p.boolean("refine", false);
  const McParams mp = mc_params(p, ctx, 10000, 64);
  const Model m = resolve(spec);
  const TimeProfile prof = read_profile(p, m);
  p.finish();
  if (!(t > s)) throw ConfigError(p.field("t") + ": needs t > s");
  const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
  McOptions opts;
  opts.refine = refine;
  const McResult r = mc_semigroup(m, prof, P, s, t, b, mp, opts);
  RunOutput out;
  out.result["estimate"] = estimate_json(r.estimate);
  out.result["dimension"] = b->size();
  out.result["vacuum"] = {r.estimate.mean.to_dense()(0, 0).real(),
                          r.estimate.mean.to_dense()(0, 0).imag()};
  add_complex_matrix(out.tables, "mean", r.estimate.mean.to_dense());
  out.tables.push_back(matrix_table("se", r.estimate.se));
  if (r.refined) {
    out.result["refined"] = estimate_json(*r.refined);
    add_complex_matrix(out.tables, "mean_refined", r.refined->mean.to_dense());
    out.tables.push_back(matrix_table("se_refined", r.refined->se));
  }
  out.tables.push_back(basis_legend(*b));
  return out;
}

RunOutput fk_vs_oracle_run(const ModelSpec& spec, Params& p, const RunContext& ctx) {
  const RVec P = p.vector("P", spec.d, zero(spec.d));
  const double t = p.number("t", 1.0);
  const int N = p.integer("max_bosons", 2);
  const int pad = p.integer("pad", 12);
  const bool flip = p.boolean("flip_sign", false);
  const McParams mp = mc_params(p, ctx, 200000, 64);
  p.finish();
  if (!(t > 0.0)) throw ConfigError(p.field("t") + ": must be positive");
  if (pad < 0) throw ConfigError(p.field("pad") + ": must be >= 0");
  const Model m = resolve(spec);
  const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
  checked_basis(m.modes(), N + pad, p.field("pad"));
  const FkReport r = fk_vs_oracle(m, P, t, b, pad, mp, flip);
  RunOutput out;
  out.result = {{"max_ratio", r.max_ratio}, {"max_z", r.max_z}, {"pass", r.pass},
                {"dimension", b->size()},   {"n_paths", mp.n_paths}, {"J", mp.J},
                {"P", vec_json(P)},         {"t", t},               {"flip_sign", flip}};
  add_complex_matrix(out.tables, "estimate", r.estimate);
  add_complex_matrix(out.tables, "estimate_refined", r.estimate_fine);
  add_complex_matrix(out.tables, "oracle", r.oracle);
  out.tables.push_back(matrix_table("deviation", r.deviation));
  out.tables.push_back(matrix_table("tolerance", r.tolerance));
  out.tables.push_back(basis_legend(*b));
  out.pass = r.pass;
  return out;
}

Positivity parse_class(const std::string& s, const std::string& field) {
  if (s == "improving") return Positivity::Improving;
  if (s == "preserving") return Positivity::Preserving;
  if (s == "neither") return Positivity::Neither;
  throw ConfigError(field + ": expected improving, preserving or neither");
}

RunOutput positivity_audit_run(const ModelSpec& spec, Params& p, const RunContext& ctx) {
  const std::vector<RVec> Ps = p.vectors("P_list", spec.d, std::vector<RVec>{zero(spec.d)});
  const std::vector<double> times = p.numbers("times", std::vector<double>{0.25, 1.0, 4.0});
  const int N = p.integer("max_bosons", 2);
  const std::string source = p.string("source", "oracle");
  const double tol = p.number("tol", 1e-12);
  const Positivity expect = parse_class(p.string("expect", "improving"), p.field("expect"));
  McParams mp;
  if (source == "mc") {
    mp = mc_params(p, ctx, 10000, 32);
  } else if (source != "oracle") {
    throw ConfigError(p.field("source") + ": expected oracle or mc");
  }
  p.finish();
  const Model m = resolve(spec);
  const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
  RunOutput out;
  Table tab{"audit", {"P", "t", "classification", "min_entry", "max_imag", "min_margin", "tol"}, {}};
  std::size_t blocks = static_cast<std::size_t>(N) + 1;
  Table bm{"block_minima", {"P", "t"}, {}};
  for (std::size_t k = 0; k < blocks; ++k) bm.header.push_back("total" + std::to_string(k));
  out.result["rows"] = json::array();
  for (std::size_t i = 0; i < Ps.size(); ++i) {
    const FockOperator H = source == "oracle" ? build_hamiltonian(m, Ps[i], b) : FockOperator();
    for (double t : times) {
      if (!(t > 0.0)) throw ConfigError(p.field("times") + ": times must be positive");
      PositivityReport r;
      if (source == "oracle") {
        r = positivity_audit(oracle_expm(H, t), tol);
      } else {
        McParams q = mp;
        q.seed = mp.seed + i;
        r = positivity_audit(mc_semigroup(m, nelson_profile(m), Ps[i], 0.0, t, b, q).estimate, tol);
      }
      const bool ok = r.classification == expect;
      out.pass = out.pass && ok;
      tab.rows.push_back({std::to_string(i), fmt(t), to_string(r.classification), fmt(r.min_entry),
                          fmt(r.max_imag), fmt(r.min_margin), fmt(r.tol)});
      std::vector<std::string> row{std::to_string(i), fmt(t)};
      for (double v : r.block_minima) row.push_back(fmt(v));
      bm.rows.push_back(std::move(row));
      out.result["rows"].push_back({{"P", vec_json(Ps[i])},
                                    {"t", t},
                                    {"classification", to_string(r.classification)},
                                    {"min_entry", r.min_entry},
                                    {"fingerprint", r.fingerprint},
                                    {"matches_expectation", ok}});
    }
  }
  out.result["expect"] = to_string(expect);
  out.result["source"] = source;
  out.tables.push_back(std::move(tab));
  out.tables.push_back(std::move(bm));
  out.tables.push_back(basis_legend(*b));
  return out;
}

RunOutput dispersion_scan_run(const ModelSpec& spec, Params& p, const RunContext&) {
  RVec e1 = zero(spec.d);
  e1[0] = 1.0;
  std::vector<RVec> def;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) def.push_back(x * e1);
  const std::vector<RVec> Ps = p.vectors("P_list", spec.d, def);
  const int N = p.integer("max_bosons", 2);
  const double t_power = p.number("t_power", 0.0);
  p.finish();
  const Model m = resolve(spec);
  const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
  const auto rows = dispersion_scan(m, Ps, b, t_power);
  RunOutput out;
  Table tab{"dispersion", {"row"}, {}};
  for (int a = 0; a < spec.d; ++a) tab.header.push_back("P" + std::to_string(a));
  for (const char* h : {"E0", "gap", "perron", "E0_minus_E0_at_zero"}) tab.header.push_back(h);
  const double E00 = ground_state(build_hamiltonian(m, zero(spec.d), b)).E0;
  out.result["rows"] = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::vector<std::string> row{std::to_string(i)};
    for (int a = 0; a < spec.d; ++a) row.push_back(fmt(r.P[a]));
    row.push_back(fmt(r.report.E0));
    row.push_back(fmt(r.report.gap));
    row.push_back(r.report.perron ? "1" : "0");
    row.push_back(fmt(r.report.E0 - E00));
    tab.rows.push_back(std::move(row));
    out.result["rows"].push_back({{"P", vec_json(r.P)},
                                  {"E0", r.report.E0},
                                  {"gap", r.report.gap},
                                  {"perron", r.report.perron}});
  }
  out.result["E0_at_zero"] = E00;
  out.tables.push_back(std::move(tab));
  return out;
}

RunOutput renorm_scan_run(const ModelSpec& spec, Params& p, const RunContext& ctx) {
  const std::vector<double> Ls = p.numbers("Lambda_list", std::vector<double>{2.0, 4.0, 8.0});
  const double cell = p.number("cell_side", 1.0);
  const RVec P = p.vector("P", spec.d, zero(spec.d));
  const double t = p.number("t", 1.0);
  const McParams mp = mc_params(p, ctx, 1000, 256);
  p.finish();
  if (!(cell > 0.0)) throw ConfigError(p.field("cell_side") + ": must be positive");
  for (double L : Ls) {
    const double c = 2.0 * L / cell;
    if (!(L > 0.0) || std::abs(c - std::round(c)) > 1e-9) {
      throw ConfigError(p.field("Lambda_list") + ": 2 Lambda / cell_side must be an integer");
    }
  }
  const RenormReport r = renorm_scan(spec, Ls, cell, P, t, mp);
  RunOutput out;
  Table tab{"renorm",
            {"Lambda", "cells_per_axis", "modes", "E_Lambda", "vacuum_re", "vacuum_im",
             "vacuum_se", "E0", "E0_minus_ELambda", "E0_minus_ELambda_se"},
            {}};
  for (const auto& row : r.rows) {
    tab.rows.push_back({fmt(row.Lambda), std::to_string(row.cells_per_axis),
                        std::to_string(row.modes), fmt(row.E_Lambda), fmt(row.vacuum.real()),
                        fmt(row.vacuum.imag()), fmt(row.vacuum_se), fmt(row.E0),
                        fmt(row.E0_minus_ELambda), fmt(row.E0_minus_ELambda_se)});
  }
  out.result = {{"differences", r.differences},
                {"strictly_decreasing", r.strictly_decreasing},
                {"n_paths", mp.n_paths},
                {"J", mp.J},
                {"t", t}};
  out.pass = r.strictly_decreasing;
  out.tables.push_back(std::move(tab));
  return out;
}

RunOutput trotter_check_run(const ModelSpec& spec, Params& p, const RunContext&) {
  const Model m = resolve(spec);
  const RVec P1 = p.vector("P1", spec.d, zero(spec.d)), P2 = p.vector("P2", spec.d, zero(spec.d));
  const std::vector<int> th1 = checked_theta(p, "theta1", m.modes());
  const std::vector<int> th2 = checked_theta(p, "theta2", m.modes());
  for (int q : th2) {
    if (std::find(th1.begin(), th1.end(), q) != th1.end()) {
      throw ConfigError(p.field("theta1") + " and " + p.field("theta2") + ": overlap at mode " +
                        std::to_string(q));
    }
  }
  const double T = p.number("T", 1.0);
  const std::vector<int> Ns = p.integers("N_list", std::vector<int>{4, 8, 16, 32});
  const int N = p.integer("max_bosons", 2);
  const int pad = p.integer("pad", 2);
  const std::vector<double> range = p.numbers("ratio_range", std::vector<double>{1.7, 2.3});
  p.finish();
  if (range.size() != 2) throw ConfigError(p.field("ratio_range") + ": expected two numbers");
  for (int n : Ns) {
    if (n < 1) throw ConfigError(p.field("N_list") + ": entries must be >= 1");
  }
  if (pad < 0) throw ConfigError(p.field("pad") + ": must be >= 0");
  checked_basis(m.modes(), N + pad, p.field("max_bosons"));
  const TrotterReport r = trotter_check(m, P1, P2, th1, th2, T, Ns, N, pad);
  RunOutput out;
  Table tab{"trotter", {"N", "error", "relative_error"}, {}};
  for (std::size_t i = 0; i < r.N.size(); ++i) {
    tab.rows.push_back({std::to_string(r.N[i]), fmt(r.error[i]), fmt(r.error[i] / r.target_norm)});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < r.error.size(); ++i) monotone = monotone && r.error[i] < r.error[i - 1];
  bool in_range = true;
  for (double q : r.ratios) in_range = in_range && q >= range[0] && q <= range[1];
  out.result = {{"ratios", r.ratios},       {"fitted_order", r.fitted_order},
                {"target_norm", r.target_norm}, {"L_lower_bound", r.L_lower_bound},
                {"monotone", monotone},     {"ratios_in_range", in_range}};
  out.pass = monotone && in_range;
  out.tables.push_back(std::move(tab));
  return out;
}

RunOutput flow_check_run(const ModelSpec& spec, Params& p, const RunContext& ctx) {
  const RVec P = p.vector("P", spec.d, zero(spec.d));
  const double s = p.number("s", 0.0), r = p.number("r", 0.5), t = p.number("t", 1.0);
  const std::string mode = p.string("mode", "oracle");
  const int N = p.integer("max_bosons", 2);
  const Model m = resolve(spec);
  RunOutput out;
  if (!(s < r && r < t)) throw ConfigError(p.field("r") + ": needs s < r < t");
  if (mode == "oracle") {
    const TimeProfile prof = read_profile(p, m);
    const double tol = p.number("tol", 1e-10);
    p.finish();
    const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
    const double defect = flow_check_oracle(m, prof, P, s, r, t, b);
    out.result = {{"mode", mode}, {"defect", defect}, {"tol", tol}, {"profile", prof.name}};
    out.pass = defect <= tol;
  } else if (mode == "mc") {
    const int frame = p.integer("frame_bosons", 1);
    const McParams mp = mc_params(p, ctx, 20000, 32);
    p.finish();
    const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
    const FlowMcReport rep = flow_check_mc(m, P, s, r, t, b, frame, mp);
    out.result = {{"mode", mode},
                  {"defect", rep.defect},
                  {"max_ratio", rep.max_ratio},
                  {"frame_bosons", frame},
                  {"n_paths", mp.n_paths},
                  {"J", mp.J}};
    out.pass = rep.pass;
  } else {
    throw ConfigError(p.field("mode") + ": expected oracle or mc");
  }
  return out;
}

RunOutput evolution_check_run(const ModelSpec& spec, Params& p, const RunContext&) {
  const RVec P = p.vector("P", spec.d, zero(spec.d));
  const double s = p.number("s", 0.0), t = p.number("t", 0.7);
  const std::vector<double> deltas =
      p.numbers("delta_list", std::vector<double>{1e-2, 5e-3, 2.5e-3});
  const int N = p.integer("max_bosons", 2);
  const double min_order = p.number("min_order", 0.9);
  const Model m = resolve(spec);
  const TimeProfile prof = read_profile(p, m);
  p.finish();
  if (!(t > s)) throw ConfigError(p.field("t") + ": needs t > s");
  for (double d : deltas) {
    if (!(d > 0.0)) throw ConfigError(p.field("delta_list") + ": entries must be positive");
  }
  const BasisPtr b = checked_basis(m.modes(), N, p.field("max_bosons"));
  const EvolutionReport r = evolution_check(m, prof, P, s, t, deltas, b);
  RunOutput out;
  Table tab{"evolution", {"delta", "residual"}, {}};
  for (std::size_t i = 0; i < r.delta.size(); ++i) {
    tab.rows.push_back({fmt(r.delta[i]), fmt(r.residual[i])});
  }
  out.result = {{"fitted_order", r.fitted_order}, {"min_order", min_order}, {"profile", prof.name}};
  out.pass = r.delta.size() < 2 || r.fitted_order >= min_order;
  out.tables.push_back(std::move(tab));
  return out;
}

using Runner = std::function<RunOutput(const ModelSpec&, Params&, const RunContext&)>;

struct Entry {
  Runner run;
  const char* doc;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r = {
      {"validate-levy",
       {validate_levy,
        "Empirical characteristic function of the driving Levy process against\n"
        "e^{-t Psi(k)}, the two-time product identity, and for the relativistic\n"
        "process the inverse-Gaussian subordinator mean and Laplace transform.\n"
        "params: k (list of d-vectors), times, n_paths, z_max, k1, k2, t1, t2"}},
      {"build-hamiltonian",
       {build_hamiltonian_run,
        "Dense fiber Hamiltonian H(P) = Psi(P - dGamma(k)) + dGamma(omega) + phi(v)\n"
        "on the truncated Fock basis, with its ground energy and gap.\n"
        "params: P, max_bosons"}},
      {"mc-run",
       {mc_run,
        "Monte Carlo Feynman-Kac estimate of the semigroup over the window (s, t)\n"
        "with per-entry standard errors; optional 2J refinement on the same paths.\n"
        "params: P, s, t, max_bosons, n_paths, J, refine, profile"}},
      {"fk-vs-oracle",
       {fk_vs_oracle_run,
        "Monte Carlo estimate at J and 2J against the dense e^{-tH(P)}; each entry\n"
        "must lie within 3 combined standard errors plus the J -> 2J quadrature\n"
        "budget. flip_sign negates the coupling in the estimator only.\n"
        "params: P, t, max_bosons, pad, n_paths, J, flip_sign"}},
      {"positivity-audit",
       {positivity_audit_run,
        "Entrywise classification of e^{-tH(P)} (oracle) or of its Monte Carlo\n"
        "estimate as improving, preserving or neither, with per-block minima.\n"
        "params: P_list, times, max_bosons, source (oracle|mc), tol, expect,\n"
        "n_paths, J"}},
      {"dispersion-scan",
       {dispersion_scan_run,
        "Ground energy E0(P), spectral gap and Perron flag of the ground vector\n"
        "across a list of total momenta.\n"
        "params: P_list, max_bosons, t_power"}},
      {"renorm-scan",
       {renorm_scan_run,
        "Ultraviolet chain over Lambda with fixed cell side: each model is\n"
        "estimated with the E_Lambda subtraction (weights e^{u + t E_Lambda}) on\n"
        "common random numbers, and the successive differences of E0 - E_Lambda\n"
        "must strictly decrease.\n"
        "params: Lambda_list, cell_side, P, t, n_paths, J"}},
      {"trotter-check",
       {trotter_check_run,
        "Product formula for a split of the modes into theta1 and theta2: the\n"
        "Q-sandwich product (Q S_{T/N} Q e^{-(T/N) L})^N against the tensor target\n"
        "Q (S^theta1(P1) x S^theta2(P2)) Q, where Q projects onto states living on\n"
        "theta1 u theta2. Errors must decrease with ratios in ratio_range.\n"
        "params: P1, P2, theta1, theta2, T, N_list, max_bosons, pad, ratio_range"}},
      {"flow-check",
       {flow_check_run,
        "Flow identity S_{s,t} = S_{r,t} S_{s,r}: exact propagators (oracle) or\n"
        "three independent Monte Carlo windows (mc).\n"
        "params: P, s, r, t, mode (oracle|mc), max_bosons, profile, tol,\n"
        "frame_bosons, n_paths, J"}},
      {"evolution-check",
       {evolution_check_run,
        "Forward difference (S_{s,t+delta} - S_{s,t}) / delta + h(t) S_{s,t} for the\n"
        "time-dependent generator; the residual must vanish at order >= min_order.\n"
        "params: P, s, t, delta_list, max_bosons, profile, min_order"}},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& variants() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : registry()) out.push_back(k);
    return out;
  }();
  return v;
}

std::string describe(const std::string& variant) {
  const auto it = registry().find(variant);
  if (it == registry().end()) throw ConfigError("unknown variant: " + variant);
  return variant + "\n" + it->second.doc + "\n";
}

RunOutput run_experiment(const std::string& variant, const ModelSpec& spec, Params& params,
                         const RunContext& ctx) {
  const auto it = registry().find(variant);
  if (it == registry().end()) throw ConfigError("unknown variant: " + variant);
  return it->second.run(spec, params, ctx);
}

}  // namespace nfk::cli
