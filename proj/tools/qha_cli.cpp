// qha_cli: experiment runner for mixed-state localization operators.
//
// Exit codes: 0 success, 1 a check or computation failed, 2 usage error.

#include <qha/experiments.hpp>
#include <qha/version.hpp>

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <iomanip>
#include <iostream>

namespace ex = qha::experiments;
namespace fs = std::filesystem;
using qha::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i)
    ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return ss.str();
}

/// Collects written files so the manifest can hash them.
class Artifacts {
public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string &name, const std::string &text) {
    qha::io::write_text(dir_ / name, text);
    hashes_[name] = sha256_hex(text);
  }
  void write(const std::string &name, const json &j) { write(name, j.dump(2) + "\n"); }

  void write_manifest(const std::string &command, const json &config, int threads) {
    json artifacts = json::object();
    for (const auto &[name, hash] : hashes_)
      artifacts[name] = json{{"sha256", hash}};
    const json manifest{
        {"command", command},
        {"config", config},
        {"threads", threads},
        {"csv_schema_version", ex::kCsvSchemaVersion},
        {"artifacts", artifacts},
        {"versions",
         {{"qha", qha::kVersion},
          {"compiler", __VERSION__},
          {"cplusplus", __cplusplus},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION},
          {"openssl", OPENSSL_VERSION_TEXT}}}};
    qha::io::write_text(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

  const fs::path &dir() const { return dir_; }

private:
  fs::path dir_;
  std::map<std::string, std::string> hashes_;
};

struct CommonOptions {
  std::string config;
  std::string out;
  std::string state;
  std::int64_t seed = -1;
  int n = 0;
  int threads = 0;
};

void add_common(CLI::App *sub, CommonOptions &o, bool config_required) {
  auto *c = sub->add_option("--config", o.config, "JSON experiment config");
  if (config_required)
    c->required()->check(CLI::ExistingFile);
  else
    c->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory (overrides the config)");
  sub->add_option("--seed", o.seed, "random seed (overrides the config)")->check(CLI::NonNegativeNumber);
  sub->add_option("--state", o.state, "state string (overrides the config)");
  sub->add_option("--threads", o.threads, "worker threads (default: QHA_THREADS or 1)")
      ->check(CLI::PositiveNumber);
}

/// Loads the config and applies command-line overrides. Input problems
/// surface as UsageError.
ex::ExperimentConfig resolve_config(const CommonOptions &o) {
  try {
    ex::ExperimentConfig c = o.config.empty() ? ex::config_from_json(json::object()) : ex::load_config(o.config);
    if (o.n > 0) {
      json src = c.source;
      src["N"] = o.n;
      c = ex::config_from_json(src, c.base_dir);
    }
    if (!o.out.empty())
      c.out = o.out;
    if (o.seed >= 0)
      c.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.state.empty())
      c.state = o.state;
    return c;
  } catch (const qha::Error &e) {
    throw UsageError(e.what());
  }
}

json config_echo(const ex::ExperimentConfig &c) {
  return json{{"source", c.source},
              {"resolved",
               {{"N", c.N},
                {"state", c.state},
                {"shape", c.shape_json},
                {"R", c.R},
                {"deltas", c.deltas},
                {"seed", c.seed},
                {"tolerances",
                 {{"identity", c.tol.identity}, {"bound_slack", c.tol.bound_slack}, {"range", c.tol.range}}},
                {"trend",
                 {{"delta", c.trend.trend_delta},
                  {"max_nonmonotone", c.trend.max_nonmonotone},
                  {"min_reduction", c.trend.min_reduction},
                  {"max_band", c.trend.max_band}}}}}};
}

/// Builds the state and checks the sweep inputs; failures are usage errors.
qha::DensityOperator prepare(const ex::ExperimentConfig &c, bool sharpness) {
  try {
    if (sharpness) {
      const auto *ball = std::get_if<qha::Ball>(&c.shape.kind());
      if (!ball || ball->cx != 0 || ball->cy != 0)
        throw qha::NotABall("sharpness sweeps need a ball centred at the origin");
    }
    ex::validate(c);
    return ex::make_state(c.state, c.lattice(), c.seed, c.base_dir);
  } catch (const qha::Error &e) {
    throw UsageError(e.what());
  }
}

int report_checks(const ex::SweepResult &r) {
  int failed = 0;
  for (const auto &c : r.checks)
    if (!c.passed) {
      ++failed;
      std::cout << "FAIL " << c.name << "  " << c.detail << "\n";
    }
  std::cout << r.checks.size() - failed << "/" << r.checks.size() << " checks passed\n";
  return failed ? kExitFailed : kExitOk;
}

int run_sweep(const std::string &command, const CommonOptions &o) {
  const ex::ExperimentConfig c = resolve_config(o);
  const bool sharp = command == "sharpness";
  const qha::DensityOperator S = prepare(c, sharp);
  if (command == "plunge") {
    try {
      (void)ex::detail::delta_index(c);
    } catch (const qha::Error &e) {
      throw UsageError(e.what());
    }
  }
  const ex::SweepResult r = command == "plunge"   ? ex::run_plunge_sweep(c, S)
                            : command == "converge" ? ex::run_convergence_sweep(c, S)
                                                    : ex::run_sharpness(c, S);
  Artifacts out(c.out);
  out.write("sweep.csv", ex::sweep_csv(r.rows, c.deltas));
  out.write("checks.json", ex::to_json(r));
  out.write_manifest(command, config_echo(c), qha::num_threads());
  std::cout << command << ": " << r.rows.size() << " rows, state " << S.label() << ", written to "
            << out.dir().string() << "\n";
  if (!r.report.empty())
    std::cout << r.report.dump() << "\n";
  return report_checks(r);
}

int run_accumulate(const CommonOptions &o) {
  const ex::ExperimentConfig c = resolve_config(o);
  const qha::DensityOperator S = prepare(c, false);
  const qha::PhaseLattice lat = c.lattice();
  const qha::Domain omega = qha::rasterize(c.shape, c.R.front(), lat);
  const auto r = qha::analyze(omega, S);
  const auto rho = qha::accumulate(r, S);
  const qha::RealGrid chi = qha::indicator(omega);
  qha::RealGrid diff(lat);
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = std::abs(rho.grid[i] - chi[i]);
  const qha::RealGrid st = qha::s_tilde(S.matrix());

  json summary = qha::io::summary_json(r, st);
  summary["R"] = c.R.front();
  summary["l1_error"] = qha::l1_error(rho);
  summary["state"] = S.label();

  Artifacts out(c.out);
  out.write("rho.csv", qha::io::grid_csv(rho.grid));
  out.write("chi.csv", qha::io::grid_csv(chi));
  out.write("diff.csv", qha::io::grid_csv(diff));
  out.write("eigenvalues.csv", qha::io::eigenvalues_csv(r.eig));
  out.write("domain.json", qha::io::to_json(omega));
  out.write("summary.json", summary);
  out.write_manifest("accumulate", config_echo(c), qha::num_threads());
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int run_state_info(const CommonOptions &o) {
  if (o.config.empty() && (o.state.empty() || o.n <= 0))
    throw UsageError("state-info needs --config, or --state together with --n");
  const ex::ExperimentConfig c = resolve_config(o);
  ex::StateInfo info = [&] {
    try {
      return ex::state_info(c.state, c.lattice(), c.seed, c.base_dir);
    } catch (const qha::Error &e) {
      throw UsageError(e.what());
    }
  }();
  json report{{"state", info.label},
              {"N", c.N},
              {"accepted", info.report.accepted()},
              {"hermitian_residual", info.report.hermitian_residual},
              {"min_eigenvalue", info.report.min_eigenvalue},
              {"trace_residual", info.report.trace_residual},
              {"diagnosis", info.report.describe()},
              {"mstar_norm_sq", info.mstar}};
  std::string eig = "k,lambda\n";
  for (std::size_t k = 0; k < info.eigenvalues.size(); ++k)
    eig += std::to_string(k + 1) + "," + qha::io::fmt(info.eigenvalues[k]) + "\n";

  Artifacts out(c.out);
  out.write("state.json", qha::io::to_json(info.matrix));
  out.write("eigenvalues.csv", eig);
  out.write("s_tilde.csv", qha::io::grid_csv(info.s_tilde));
  out.write("report.json", report);
  out.write_manifest("state-info", config_echo(c), qha::num_threads());
  std::cout << report.dump() << "\n";
  return info.report.accepted() ? kExitOk : kExitFailed;
}

int run_identities_cmd(int n, std::uint64_t seed, int pairs, bool corrupt, double tol, const std::string &dir) {
  const ex::IdentityReport rep = ex::run_identities(n, seed, pairs, corrupt, tol);
  for (const auto &i : rep.items)
    std::cout << (i.passed() ? "ok   " : "FAIL ") << std::left << std::setw(44) << i.name
              << qha::io::fmt(i.residual) << "\n";
  if (!dir.empty()) {
    Artifacts out(dir);
    out.write("identities.csv", ex::identities_csv(rep));
    out.write("identities.json", ex::to_json(rep));
    out.write_manifest("identities",
                       json{{"N", n}, {"seed", seed}, {"pairs", pairs}, {"corrupt", corrupt}, {"tol", tol}},
                       qha::num_threads());
  }
  return rep.ok() ? kExitOk : kExitFailed;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Quantum harmonic analysis experiments on the finite phase-space lattice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qha::kVersion);

  int id_n = 8, id_pairs = 20, id_threads = 0;
  std::uint64_t id_seed = 0;
  bool id_corrupt = false;
  double id_tol = 1e-8;
  std::string id_out;
  auto *ident = app.add_subcommand("identities", "check the exact finite identities on random inputs");
  ident->add_option("--n", id_n, "lattice size N")->check(CLI::PositiveNumber);
  ident->add_option("--seed", id_seed, "random seed");
  ident->add_option("--pairs", id_pairs, "random (state, domain) pairs")->check(CLI::PositiveNumber);
  ident->add_option("--tol", id_tol, "residual tolerance");
  ident->add_option("--out", id_out, "write identities.csv/json and a manifest here");
  ident->add_option("--threads", id_threads, "worker threads")->check(CLI::PositiveNumber);
  ident->add_flag("--corrupt", id_corrupt, "inject a fault to test the harness");

  std::map<std::string, CommonOptions> opts;
  for (const auto &[name, help] : std::vector<std::pair<std::string, std::string>>{
           {"plunge", "plunge counts along a dilation sweep"},
           {"converge", "accumulated-distribution errors along a dilation sweep"},
           {"sharpness", "two-sided linear scaling of the L1 error for balls"},
           {"accumulate", "export rho, chi and |rho - chi| for the first R"}}) {
    add_common(app.add_subcommand(name, help), opts[name], true);
  }
  auto *info = app.add_subcommand("state-info", "validate a state and export S~");
  add_common(info, opts["state-info"], false);
  info->add_option("--n", opts["state-info"].n, "lattice size N (overrides the config)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App *sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "identities") {
      if (id_threads > 0)
        qha::set_num_threads(id_threads);
      return run_identities_cmd(id_n, id_seed, id_pairs, id_corrupt, id_tol, id_out);
    }
    const CommonOptions &o = opts.at(name);
    if (o.threads > 0)
      qha::set_num_threads(o.threads);
    if (name == "accumulate")
      return run_accumulate(o);
    if (name == "state-info")
      return run_state_info(o);
    return run_sweep(name, o);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}
