#pragma once

// Experiment runner: JSON configs, the state-string grammar, dilation sweeps
// with per-row inequality checks, and the exact-identity suite.

#include <qha/accumulation.hpp>
#include <qha/io.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <random>

namespace qha::experiments {

namespace fs = std::filesystem;
using io::json;

inline constexpr int kCsvSchemaVersion = 1;

struct Tolerances {
  double identity = 1e-8;    ///< residual allowed in exact identities
  double bound_slack = 1e-8; ///< slack added to finite inequalities
  double range = 1e-10;      ///< slack on 0 <= rho <= 1
};

struct TrendSettings {
  double trend_delta = 0.5;   ///< delta whose plunge ratio is tracked
  int max_nonmonotone = 1;    ///< decreasing steps allowed in the plunge ratio
  double min_reduction = 1.5; ///< relative L1 error, first row over last row
  double max_band = 6.0;      ///< max/min of l1_error / radius
};

struct ExperimentConfig {
  int N = 64;
  std::string state = "rankone:gaussian";
  ShapeSpec shape = ShapeSpec::ball(0, 0, 1);
  json shape_json = json{{"kind", "ball"}, {"center", {0.0, 0.0}}, {"radius", 1.0}};
  std::vector<double> R{1.0}; ///< dilation factors in absolute length units
  std::vector<double> deltas{0.25, 0.5, 0.75};
  fs::path out = "out";
  std::uint64_t seed = 0;
  Tolerances tol;
  TrendSettings trend;
  fs::path base_dir = "."; ///< relative state files resolve against this
  json source;             ///< config as given, echoed into manifests

  PhaseLattice lattice() const { return PhaseLattice(N); }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

inline std::vector<double> parse_r_grid(const json &j, double unit) {
  std::vector<double> r;
  if (j.is_number()) {
    r.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto &v : j)
      r.push_back(v.get<double>());
  } else if (j.is_object()) {
    const double start = j.at("start").get<double>(), stop = j.at("stop").get<double>();
    const double step = j.value("step", 1.0);
    if (!(step > 0) || stop < start)
      throw ParseError("R range needs step > 0 and stop >= start");
    const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i)
      r.push_back(start + i * step);
  } else {
    throw ParseError("R must be a number, a list, or {start, stop, step}");
  }
  for (auto &x : r)
    x *= unit;
  return r;
}

inline ShapeSpec parse_shape(const json &j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ball") {
    const auto c = j.value("center", std::vector<double>{0.0, 0.0});
    if (c.size() != 2)
      throw ParseError("ball center must have two coordinates");
    return ShapeSpec::ball(c[0], c[1], j.value("radius", 1.0));
  }
  if (kind == "rectangle") {
    const auto c = j.at("corner").get<std::vector<double>>();
    const auto w = j.at("widths").get<std::vector<double>>();
    if (c.size() != 2 || w.size() != 2)
      throw ParseError("rectangle needs corner and widths pairs");
    return ShapeSpec::rectangle(c[0], c[1], w[0], w[1]);
  }
  if (kind == "explicit") {
    std::vector<LatticePoint> pts;
    for (const auto &p : j.at("points"))
      pts.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return ShapeSpec::explicit_mask(std::move(pts));
  }
  throw ParseError("unknown shape kind '" + kind + "'");
}

} // namespace detail

/// Reads a config object. R values are in units of l unless "R_unit" is
/// "absolute".
inline ExperimentConfig config_from_json(const json &j, const fs::path &base_dir = ".") {
  ExperimentConfig c;
  c.source = j;
  c.base_dir = base_dir;
  try {
    c.N = j.value("N", c.N);
    if (c.N < 1)
      throw ParseError("N must be positive");
    c.state = j.value("state", c.state);
    if (j.contains("shape")) {
      c.shape_json = j.at("shape");
      c.shape = detail::parse_shape(c.shape_json);
    }
    const std::string unit = j.value("R_unit", std::string("l"));
    if (unit != "l" && unit != "absolute")
      throw ParseError("R_unit must be \"l\" or \"absolute\"");
    const double scale = unit == "l" ? PhaseLattice(c.N).unit() : 1.0;
    if (j.contains("R"))
      c.R = detail::parse_r_grid(j.at("R"), scale);
    if (j.contains("deltas"))
      c.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("out"))
      c.out = j.at("out").get<std::string>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("tolerances")) {
      const auto &t = j.at("tolerances");
      c.tol.identity = t.value("identity", c.tol.identity);
      c.tol.bound_slack = t.value("bound_slack", c.tol.bound_slack);
      c.tol.range = t.value("range", c.tol.range);
    }
    if (j.contains("trend")) {
      const auto &t = j.at("trend");
      c.trend.trend_delta = t.value("delta", c.trend.trend_delta);
      c.trend.max_nonmonotone = t.value("max_nonmonotone", c.trend.max_nonmonotone);
      c.trend.min_reduction = t.value("min_reduction", c.trend.min_reduction);
      c.trend.max_band = t.value("max_band", c.trend.max_band);
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const fs::path &p) {
  return config_from_json(io::read_json(p), p.has_parent_path() ? p.parent_path() : fs::path("."));
}

/// Checks the invariants a sweep relies on; throws on the first violation.
inline void validate(const ExperimentConfig &c) {
  if (c.R.empty())
    throw BadArgument("R grid is empty");
  for (std::size_t i = 0; i < c.R.size(); ++i) {
    if (!(c.R[i] > 0))
      throw BadArgument("R values must be positive");
    if (i && !(c.R[i] > c.R[i - 1]))
      throw BadArgument("R grid must be strictly increasing");
  }
  for (double d : c.deltas)
    if (!(d > 0 && d < 1))
      throw BadDelta("deltas must lie in (0, 1)");
  const PhaseLattice lat = c.lattice();
  for (double r : c.R)
    rasterize(c.shape, r, lat);
}

// ---------------------------------------------------------------------------
// State specs

namespace detail {

inline std::map<std::string, std::string> parse_keyvals(const std::string &s) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos <= s.size() && !s.empty()) {
    const auto comma = s.find(',', pos);
    const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
    if (comma == std::string::npos)
      break;
    pos = comma + 1;
  }
  return kv;
}

inline double to_number(const std::string &s, const std::string &what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw ParseError(what + ": '" + s + "' is not a number");
  }
}

inline int to_int(const std::string &s, const std::string &what) {
  const double v = to_number(s, what);
  if (v != std::floor(v))
    throw ParseError(what + ": '" + s + "' is not an integer");
  return static_cast<int>(v);
}

inline fs::path resolve(const fs::path &base, const std::string &p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

} // namespace detail

/// Builds a density operator from a state string:
///   rankone:gaussian | rankone:hermite=<k> | rankone:delta
///   thermal:lambda=<x>,K=<k>
///   mixed                          maximally mixed state I/N
///   random:rank=<r>                seeded random mixture
///   mixture:<file>                 {"components": [{"state": STATE, "weight": w}, ...]}
///   smoothed:<f>,<base-state>      f is gauss:<sigma> or a grid file
///   operator:<file>                matrix in JSON or CSV form
inline DensityOperator make_state(const std::string &desc, const PhaseLattice &lat,
                                  std::uint64_t seed = 0, const fs::path &base_dir = ".") {
  const auto colon = desc.find(':');
  const std::string kind = desc.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : desc.substr(colon + 1);

  if (kind == "rankone") {
    if (arg == "gaussian")
      return rank_one_state(gaussian_window(lat), desc);
    if (arg == "delta") {
      SignalVector d(lat.N());
      d[0] = 1;
      return rank_one_state(d, desc);
    }
    if (arg.rfind("hermite=", 0) == 0) {
      const int k = detail::to_int(arg.substr(8), "hermite order");
      if (k < 0)
        throw ParseError("hermite order must be non-negative");
      return rank_one_state(hermite_family(lat, k + 1).back(), desc);
    }
    throw ParseError("unknown rank-one window '" + arg + "'");
  }
  if (kind == "thermal") {
    const auto kv = detail::parse_keyvals(arg);
    if (!kv.count("lambda") || !kv.count("K"))
      throw ParseError("thermal needs lambda=<x>,K=<k>");
    DensityOperator S = thermal_state(lat, detail::to_number(kv.at("lambda"), "lambda"),
                                      detail::to_int(kv.at("K"), "K"));
    return DensityOperator(S.matrix(), desc);
  }
  if (kind == "mixed")
    return DensityOperator(maximally_mixed(lat).matrix(), desc);
  if (kind == "random") {
    const auto kv = detail::parse_keyvals(arg);
    std::mt19937_64 rng(seed);
    const int rank = kv.count("rank") ? detail::to_int(kv.at("rank"), "rank") : 1;
    return DensityOperator(random_state(lat, rank, rng).matrix(), desc);
  }
  if (kind == "mixture") {
    const fs::path file = detail::resolve(base_dir, arg);
    const json j = io::read_json(file);
    std::vector<DensityOperator> parts;
    std::vector<double> weights;
    try {
      for (const auto &c : j.at("components")) {
        parts.push_back(make_state(c.at("state").get<std::string>(), lat, seed, file.parent_path()));
        weights.push_back(c.at("weight").get<double>());
      }
    } catch (const json::exception &e) {
      throw ParseError(file.string() + ": " + e.what());
    }
    if (parts.empty())
      throw ParseError(file.string() + ": no components");
    return DensityOperator(mixture(parts, weights).matrix(), desc);
  }
  if (kind == "smoothed") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos)
      throw ParseError("smoothed needs <f>,<base-state>");
    const std::string fdesc = arg.substr(0, comma);
    const DensityOperator base = make_state(arg.substr(comma + 1), lat, seed, base_dir);
    RealGrid f(lat);
    if (fdesc.rfind("gauss:", 0) == 0) {
      f = gaussian_smoother(lat, detail::to_number(fdesc.substr(6), "sigma"));
    } else {
      f = io::load_grid(detail::resolve(base_dir, fdesc));
      if (!(f.lattice() == lat))
        throw DimensionMismatch("smoother grid does not match N");
    }
    return DensityOperator(smoothed_state(f, base).matrix(), desc, 1e-9);
  }
  if (kind == "operator") {
    const OperatorMatrix A = io::load_operator(detail::resolve(base_dir, arg));
    if (A.dim() != lat.N())
      throw DimensionMismatch("operator file has dimension " + std::to_string(A.dim()));
    return DensityOperator(A, desc);
  }
  throw ParseError("unknown state kind '" + kind + "'");
}

struct StateInfo {
  std::string label;
  OperatorMatrix matrix;
  DensityReport report;
  std::vector<double> eigenvalues;
  double mstar = 0;
  RealGrid s_tilde;
};

/// Validation report for a state string. Unlike make_state, an operator file that is
/// not a density operator is reported rather than rejected.
inline StateInfo state_info(const std::string &desc, const PhaseLattice &lat, std::uint64_t seed = 0,
                            const fs::path &base_dir = ".") {
  OperatorMatrix A(lat.N());
  if (desc.rfind("operator:", 0) == 0) {
    A = io::load_operator(detail::resolve(base_dir, desc.substr(9)));
    if (A.dim() != lat.N())
      throw DimensionMismatch("operator file has dimension " + std::to_string(A.dim()));
  } else {
    A = make_state(desc, lat, seed, base_dir).matrix();
  }
  const auto report = validate_density(A);
  std::vector<double> eig;
  if (report.hermitian())
    eig = eigh(A.hermitian_part()).eigenvalues;
  return StateInfo{desc, A, report, std::move(eig), mstar_norm_sq(A), s_tilde(A)};
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double R = 0;
  double measure = 0, perimeter = 0;
  int A = 0;
  std::vector<int> plunge;          ///< per delta
  std::vector<double> plunge_bound; ///< computable bound on |count - |Omega||, per delta
  double deficiency = std::numeric_limits<double>::quiet_NaN();
  double l1_error = 0, l1_relative = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> levelset; ///< per delta
  double projection = 0;
  double mstar = 0;
  bool degenerate = false;
  // quantities used by the row checks
  double smoothed_gap = 0; ///< || rho - chi * S~ ||_1
  double rho_min = 0, rho_max = 0, rho_mass = 0;
};

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<Check> checks;
  json report = json::object();

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
  }
};

inline SweepRow compute_row(const ExperimentConfig &c, const DensityOperator &S, const RealGrid &st,
                            double mstar, double R) {
  const PhaseLattice lat = c.lattice();
  const Domain omega = rasterize(c.shape, R, lat);
  const LocalizationResult r = analyze(omega, S);
  const AccumulatedDistribution rho = accumulate(r, S);

  SweepRow row;
  row.R = R;
  row.measure = r.measure;
  row.perimeter = perimeter(omega);
  row.A = r.A;
  const double sm = second_moment(omega, st);
  for (double d : c.deltas) {
    row.plunge.push_back(plunge_count(r, d));
    row.plunge_bound.push_back(plunge_count_bound(r, d, sm));
    row.levelset.push_back(levelset_measure(rho, d));
  }
  if (r.measure > 0) {
    row.deficiency = deficiency(r);
    row.l1_relative = l1_error(rho) / r.measure;
  }
  row.l1_error = l1_error(rho);
  row.projection = projection_functional(r, st);
  row.mstar = mstar;
  row.degenerate = r.degenerate();
  row.smoothed_gap = l1_distance(rho.grid, fun_fun_conv(indicator(omega), st));
  row.rho_min = min_value(rho.grid);
  row.rho_max = max_value(rho.grid);
  row.rho_mass = rho.grid.integral();
  return row;
}

inline std::vector<SweepRow> compute_rows(const ExperimentConfig &c, const DensityOperator &S) {
  const RealGrid st = s_tilde(S.matrix());
  const double mstar = mstar_norm_sq(S);
  std::vector<SweepRow> rows(c.R.size());
  parallel_for(rows.size(), [&](std::size_t i) { rows[i] = compute_row(c, S, st, mstar, c.R[i]); });
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow> &rows, const std::vector<double> &deltas) {
  std::string s = "R,measure,perimeter,A_Omega";
  for (double d : deltas)
    s += ",plunge_" + io::fmt(d);
  s += ",deficiency,l1_error,l1_relative";
  for (double d : deltas)
    s += ",levelset_" + io::fmt(d);
  s += ",projection_functional,mstar_norm_sq,degenerate\n";
  auto num = [](double x) { return std::isnan(x) ? std::string("nan") : io::fmt(x); };
  for (const auto &r : rows) {
    s += io::fmt(r.R) + "," + io::fmt(r.measure) + "," + io::fmt(r.perimeter) + "," + std::to_string(r.A);
    for (int p : r.plunge)
      s += "," + std::to_string(p);
    s += "," + num(r.deficiency) + "," + io::fmt(r.l1_error) + "," + num(r.l1_relative);
    for (double l : r.levelset)
      s += "," + io::fmt(l);
    s += "," + io::fmt(r.projection) + "," + io::fmt(r.mstar) + "," + (r.degenerate ? "1" : "0") + "\n";
  }
  return s;
}

namespace detail {

inline std::string at_r(const SweepRow &r) { return "R=" + io::fmt(r.R); }

inline Check compare_le(std::string name, double lhs, double rhs, const std::string &where) {
  const bool ok = lhs <= rhs;
  return Check{std::move(name), ok, where + ": " + io::fmt(lhs) + (ok ? " <= " : " > ") + io::fmt(rhs)};
}

inline double min_positive_perimeter(const std::vector<SweepRow> &rows) {
  double eps = std::numeric_limits<double>::infinity();
  for (const auto &r : rows)
    if (r.perimeter > 0)
      eps = std::min(eps, r.perimeter);
  return eps;
}

inline std::size_t delta_index(const ExperimentConfig &c) {
  for (std::size_t i = 0; i < c.deltas.size(); ++i)
    if (std::abs(c.deltas[i] - c.trend.trend_delta) < 1e-12)
      return i;
  throw BadArgument("trend delta " + io::fmt(c.trend.trend_delta) + " is not in the delta list");
}

} // namespace detail

/// Plunge counts per delta; asserts the second-moment count bound per row and
/// the plunge-ratio trend at the trend delta.
inline SweepResult run_plunge_sweep(const ExperimentConfig &c, const DensityOperator &S) {
  validate(c);
  SweepResult res;
  res.rows = compute_rows(c, S);
  for (const auto &r : res.rows)
    for (std::size_t k = 0; k < c.deltas.size(); ++k)
      res.checks.push_back(detail::compare_le("plunge_count_bound", std::abs(r.plunge[k] - r.measure),
                                              r.plunge_bound[k] + c.tol.bound_slack,
                                              detail::at_r(r) + " delta=" + io::fmt(c.deltas[k])));

  const std::size_t di = detail::delta_index(c);
  json ratios = json::array();
  std::vector<double> ratio;
  for (const auto &r : res.rows) {
    ratio.push_back(r.measure > 0 ? r.plunge[di] / r.measure : std::numeric_limits<double>::quiet_NaN());
    ratios.push_back(ratio.back());
  }
  res.report["plunge_ratio"] = ratios;
  if (ratio.size() >= 2) {
    int drops = 0;
    for (std::size_t i = 1; i < ratio.size(); ++i)
      drops += !(ratio[i] >= ratio[i - 1]);
    const double first = std::abs(ratio.front() - 1), last = std::abs(ratio.back() - 1);
    res.checks.push_back(Check{"plunge_ratio_monotone", drops <= c.trend.max_nonmonotone,
                               std::to_string(drops) + " decreasing steps"});
    res.checks.push_back(Check{"plunge_ratio_approaches_one", last < first,
                               "|ratio-1| " + io::fmt(first) + " -> " + io::fmt(last)});
  }
  return res;
}

/// Accumulated distributions per R; asserts the finite error bounds per row
/// and the decrease of the relative L1 error across the sweep.
inline SweepResult run_convergence_sweep(const ExperimentConfig &c, const DensityOperator &S) {
  validate(c);
  SweepResult res;
  res.rows = compute_rows(c, S);
  const double eps = detail::min_positive_perimeter(res.rows);
  const double slack = c.tol.bound_slack;
  for (const auto &r : res.rows) {
    const std::string at = detail::at_r(r);
    res.checks.push_back(detail::compare_le("rho_at_most_one", r.rho_max, 1 + c.tol.range, at));
    res.checks.push_back(detail::compare_le("rho_nonnegative", -r.rho_min, c.tol.range, at));
    res.checks.push_back(detail::compare_le("rho_mass", std::abs(r.rho_mass - r.A), slack, at));
    if (r.measure <= 0)
      continue;
    res.checks.push_back(detail::compare_le("smoothed_gap_deficiency_bound", r.smoothed_gap,
                                            1 + 2 * r.deficiency * r.measure + slack, at));
    res.checks.push_back(detail::compare_le(
        "smoothed_gap_perimeter_bound", r.smoothed_gap / r.measure,
        1 / r.measure + 4 * std::sqrt(r.mstar) * std::sqrt(r.perimeter / r.measure) + slack, at));
    if (r.perimeter >= eps)
      res.checks.push_back(detail::compare_le("l1_error_perimeter_bound", r.l1_error,
                                              (1 / eps + 2 * r.mstar) * r.perimeter + slack, at));
  }
  res.report["perimeter_floor"] = eps;
  if (res.rows.size() >= 2) {
    const double first = res.rows.front().l1_relative, last = res.rows.back().l1_relative;
    const double reduction = first / last;
    res.report["relative_error_reduction"] = reduction;
    res.checks.push_back(Check{"relative_error_reduction", reduction >= c.trend.min_reduction,
                               io::fmt(first) + " -> " + io::fmt(last) + " (factor " + io::fmt(reduction) +
                                   ")"});
  }
  return res;
}

/// Ball sweep about the origin; reports the band of l1_error / radius and
/// asserts l1_error >= tr(T) - tr(T^2) per row.
inline SweepResult run_sharpness(const ExperimentConfig &c, const DensityOperator &S) {
  const auto *ball = std::get_if<Ball>(&c.shape.kind());
  if (!ball || ball->cx != 0 || ball->cy != 0)
    throw NotABall("sharpness sweeps need a ball centred at the origin");
  validate(c);
  SweepResult res;
  res.rows = compute_rows(c, S);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  json ratios = json::array();
  for (const auto &r : res.rows) {
    res.checks.push_back(detail::compare_le("projection_lower_bound", r.projection - c.tol.bound_slack,
                                            r.l1_error, detail::at_r(r)));
    const double ratio = r.l1_error / (ball->radius * r.R);
    ratios.push_back(ratio);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double band = hi / lo;
  res.report["l1_over_radius"] = ratios;
  res.report["band"] = json{{"min", lo}, {"max", hi}, {"ratio", band}};
  res.checks.push_back(Check{"band_ratio", lo > 0 && band <= c.trend.max_band,
                             "[" + io::fmt(lo) + ", " + io::fmt(hi) + "] ratio " + io::fmt(band)});
  return res;
}

// ---------------------------------------------------------------------------
// Exact identities

struct IdentityResidual {
  std::string name;
  double residual = 0;
  double tol = 0;
  bool passed() const { return residual <= tol; }
};

struct IdentityReport {
  int N = 0;
  std::uint64_t seed = 0;
  int pairs = 0;
  std::vector<IdentityResidual> items;

  bool ok() const {
    return std::all_of(items.begin(), items.end(), [](const auto &i) { return i.passed(); });
  }
};

namespace detail {

inline RealGrid uniform_grid(const PhaseLattice &lat, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0, 1);
  RealGrid g(lat);
  for (auto &v : g.values())
    v = u(rng);
  return g;
}

inline Domain bernoulli_domain(const PhaseLattice &lat, std::mt19937_64 &rng, double p) {
  std::bernoulli_distribution b(p);
  Domain d(lat);
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (b(rng))
      d.insert(lat.point(i));
  return d;
}

} // namespace detail

/// Runs every exact finite identity on `pairs` seeded random (S, Omega)
/// pairs and records the worst residual of each. `corrupt` perturbs one side
/// of the resolution of identity so the harness can be seen to fail.
inline IdentityReport run_identities(int N, std::uint64_t seed, int pairs = 20, bool corrupt = false,
                                     double tol = 1e-8) {
  const PhaseLattice lat(N);
  std::mt19937_64 rng(seed);
  IdentityReport rep{N, seed, pairs, {}};
  std::map<std::string, double> worst;
  const std::vector<std::string> order{"stft_moyal",
                                       "convolution_integral",
                                       "resolution_of_identity",
                                       "basis_summation",
                                       "trace_identity",
                                       "second_moment",
                                       "projection_cross_boundary",
                                       "reconstruction",
                                       "associativity_function_function_operator",
                                       "associativity_function_operator_operator"};
  for (const auto &name : order)
    worst[name] = 0;
  auto note = [&](const std::string &name, double r) { worst[name] = std::max(worst[name], r); };

  for (int p = 0; p < pairs; ++p) {
    const int rank = 1 + p % std::min(3, N);
    const DensityOperator S = random_state(lat, rank, rng);
    const DensityOperator T = random_state(lat, 1 + (p + 1) % std::min(3, N), rng);
    const Domain omega = detail::bernoulli_domain(lat, rng, 0.4);
    const RealGrid f = detail::uniform_grid(lat, rng), g = detail::uniform_grid(lat, rng);
    std::normal_distribution<double> gauss;
    SignalVector psi(N), phi(N);
    for (int t = 0; t < N; ++t) {
      psi[t] = cplx(gauss(rng), gauss(rng));
      phi[t] = cplx(gauss(rng), gauss(rng));
    }

    double stft_sum = 0;
    const ComplexGrid V = stft(psi, phi);
    for (const auto &v : V.values())
      stft_sum += std::norm(v);
    const double np = std::pow(norm(psi), 2) * std::pow(norm(phi), 2);
    note("stft_moyal", std::abs(lat.weight() * stft_sum - np) / std::max(1.0, np));

    const ComplexGrid ST = op_op_conv(S.matrix(), T.matrix());
    note("convolution_integral", std::abs(ST.integral() - S.matrix().trace() * T.matrix().trace()));

    const OperatorMatrix lhs = fun_op_conv(RealGrid(lat, 1.0), corrupt ? (1 + 1e-4) * S.matrix() : S.matrix());
    note("resolution_of_identity", max_abs_diff(lhs, S.matrix().trace() * OperatorMatrix::identity(N)));

    ComplexGrid basis(lat);
    for (int t = 0; t < N; ++t) {
      SignalVector d(N);
      d[t] = 1;
      basis += op_op_conv(S.matrix(), OperatorMatrix::outer(d, d));
    }
    double bres = 0;
    for (const auto &v : basis.values())
      bres = std::max(bres, std::abs(v - S.matrix().trace()));
    note("basis_summation", bres);

    const LocalizationResult r = analyze(omega, S);
    const RealGrid st = s_tilde(S.matrix());
    note("trace_identity", std::abs(r.op.trace().real() - r.measure));
    note("second_moment", std::abs((r.op * r.op).trace().real() - second_moment(omega, st)));
    const auto pf = projection_functional_routes(r, st);
    note("projection_cross_boundary", std::abs(pf.spectral - pf.cross_boundary));
    note("reconstruction",
         max_abs_diff(fun_fun_conv(indicator(omega), st), weighted_eigen_expansion(r)));

    note("associativity_function_function_operator",
         max_abs_diff(fun_op_conv(fun_fun_conv(f, g), S.matrix()), fun_op_conv(f, fun_op_conv(g, S.matrix()))));
    note("associativity_function_operator_operator",
         max_abs_diff(op_op_conv(fun_op_conv(f, S.matrix()), T.matrix()),
                      fun_fun_conv(to_complex(f), op_op_conv(S.matrix(), T.matrix()))));
  }
  for (const auto &name : order)
    rep.items.push_back({name, worst[name], tol});
  return rep;
}

inline json to_json(const IdentityReport &r) {
  json items = json::array();
  for (const auto &i : r.items)
    items.push_back({{"identity", i.name}, {"max_residual", i.residual}, {"tol", i.tol}, {"passed", i.passed()}});
  return json{{"N", r.N}, {"seed", r.seed}, {"pairs", r.pairs}, {"passed", r.ok()}, {"identities", items}};
}

inline std::string identities_csv(const IdentityReport &r) {
  std::string s = "identity,max_residual,tol,passed\n";
  for (const auto &i : r.items)
    s += i.name + "," + io::fmt(i.residual) + "," + io::fmt(i.tol) + "," + (i.passed() ? "1" : "0") + "\n";
  return s;
}

inline json to_json(const Check &c) {
  return json{{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}};
}

inline json to_json(const SweepResult &r) {
  json checks = json::array();
  for (const auto &c : r.checks)
    checks.push_back(to_json(c));
  return json{{"passed", r.ok()}, {"report", r.report}, {"checks", checks}};
}

} // namespace qha::experiments
