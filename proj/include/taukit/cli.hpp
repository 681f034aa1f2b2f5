#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "taukit/assumptions.hpp"
#include "taukit/cme.hpp"
#include "taukit/consistency.hpp"
#include "taukit/convergence.hpp"
#include "taukit/mesh.hpp"
#include "taukit/model_parser.hpp"
#include "taukit/parallel.hpp"
#include "taukit/report_io.hpp"
#include "taukit/rng.hpp"
#include "taukit/ssa.hpp"
#include "taukit/tau_kernel.hpp"
#include "taukit/tau_leap.hpp"
#include "taukit/version.hpp"

namespace taukit::cli {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;        // config or model errors
constexpr int kExitInconclusive = 3;  // guarded failures and failed verdicts

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string model_path;
  std::string kernel;
  std::string engine = "ssa";
  State x0;
  double T = 1.0;
  std::vector<double> tau_list;
  std::vector<int> r_list{0};
  NormSpec norm = NormSpec::one();
  std::optional<TruncationSpec> truncation;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::int64_t n_samples = 0;
  double pushforward_tolerance = 1e-9;

  // verify command
  std::vector<Coord> verify_upper;
  int verify_states = 10;
  int q = 1;
  double consistency_tolerance = 1e-6;
  std::vector<double> verify_tau_grid{0.025, 0.05, 0.1};
  std::vector<int> verify_r_list{1, 2, 3};
  std::vector<int> l_list{1, 2};
  Coord alpha_bound = 20;

  Json raw;  // canonical merged config document
  std::string model_text;
  std::string config_hash;
  std::string model_hash;
};

namespace cli_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
std::vector<T> parse_csv_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if constexpr (std::is_same_v<T, int>)
      out.push_back(std::stoi(item));
    else
      out.push_back(std::stod(item));
  }
  return out;
}

inline NormSpec norm_from_json(const Json& j) {
  const std::string kind = j.value("kind", "one");
  if (kind == "one") return NormSpec::one();
  if (kind == "inf") return NormSpec::inf();
  if (kind == "weighted") {
    if (!j.contains("weights")) throw ConfigError("weighted norm requires 'weights'");
    return NormSpec::weighted(j.at("weights").get<std::vector<double>>());
  }
  throw ConfigError("unknown norm kind '" + kind + "'");
}

inline TruncationSpec truncation_from_json(const Json& j) {
  TruncationSpec t;
  t.lower = j.at("lower").get<std::vector<Coord>>();
  t.upper = j.at("upper").get<std::vector<Coord>>();
  t.mass_tolerance = j.value("mass_tolerance", 1e-10);
  return t;
}

struct Overrides {
  std::string config_path, model, kernel, out, tau_csv, r_csv;
  std::optional<std::uint64_t> seed;
  std::optional<double> T;
};

inline ExperimentConfig load_config(const Overrides& ov) {
  Json j = Json::object();
  if (!ov.config_path.empty()) {
    try {
      j = Json::parse(read_file(ov.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config parse error: " + std::string(e.what()));
    }
  }
  // flags override config fields
  if (!ov.model.empty()) j["model"] = ov.model;
  if (!ov.kernel.empty()) j["kernel"] = ov.kernel;
  if (!ov.out.empty()) j["out"] = ov.out;
  if (ov.seed) j["seed"] = *ov.seed;
  if (ov.T) j["T"] = *ov.T;
  if (!ov.tau_csv.empty()) j["tau_list"] = parse_csv_list<double>(ov.tau_csv);
  if (!ov.r_csv.empty()) j["r_list"] = parse_csv_list<int>(ov.r_csv);

  ExperimentConfig cfg;
  try {
    cfg.raw = j;
    if (j.contains("model")) cfg.model_path = j.at("model").get<std::string>();
    cfg.kernel = j.value("kernel", "");
    cfg.engine = j.value("engine", "ssa");
    if (j.contains("x0")) cfg.x0 = j.at("x0").get<State>();
    cfg.T = j.value("T", 1.0);
    if (j.contains("tau_list")) cfg.tau_list = j.at("tau_list").get<std::vector<double>>();
    if (j.contains("r_list")) cfg.r_list = j.at("r_list").get<std::vector<int>>();
    if (j.contains("norm")) cfg.norm = norm_from_json(j.at("norm"));
    if (j.contains("truncation")) cfg.truncation = truncation_from_json(j.at("truncation"));
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.out_dir = j.value("out", "out");
    cfg.n_samples = j.value("n_samples", std::int64_t{0});
    cfg.pushforward_tolerance = j.value("pushforward_tolerance", 1e-9);
    if (j.contains("verify")) {
      const Json& v = j.at("verify");
      if (v.contains("box_upper")) cfg.verify_upper = v.at("box_upper").get<std::vector<Coord>>();
      cfg.verify_states = v.value("n_states", 10);
      cfg.q = v.value("q", 1);
      cfg.consistency_tolerance = v.value("tolerance", 1e-6);
      if (v.contains("tau_grid")) cfg.verify_tau_grid = v.at("tau_grid").get<std::vector<double>>();
      if (v.contains("r_list")) cfg.verify_r_list = v.at("r_list").get<std::vector<int>>();
      if (v.contains("l_list")) cfg.l_list = v.at("l_list").get<std::vector<int>>();
      cfg.alpha_bound = v.value("alpha_bound", Coord{20});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config field error: " + std::string(e.what()));
  }
  cfg.config_hash = hex64(fnv1a64(cfg.raw.dump()));
  return cfg;
}

inline ReactionNetwork load_model(ExperimentConfig& cfg) {
  if (cfg.model_path.empty()) throw ConfigError("no model file given (--model or config)");
  cfg.model_text = read_file(cfg.model_path);
  cfg.model_hash = hex64(fnv1a64(cfg.model_text));
  try {
    return parse_network(cfg.model_text);
  } catch (const ParseError& e) {
    throw ConfigError("model error in " + cfg.model_path + ": " + e.what());
  }
}

inline void require_seed(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw ConfigError("seed is required for reproducible runs");
}

inline void require_decreasing_taus(const std::vector<double>& taus) {
  if (taus.empty()) throw ConfigError("tau_list must not be empty");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0)) throw ConfigError("tau values must be positive");
    if (i > 0 && !(taus[i] < taus[i - 1]))
      throw ConfigError("tau_list must be strictly decreasing");
  }
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

inline Json meta_json(const ExperimentConfig& cfg) {
  return Json{{"version", kVersion},
              {"config", cfg.config_hash},
              {"model_hash", cfg.model_hash}};
}

inline State default_x0(const ExperimentConfig& cfg, const ReactionNetwork& net) {
  if (cfg.x0.empty()) throw ConfigError("x0 is required");
  if (static_cast<int>(cfg.x0.size()) != net.num_species())
    throw ConfigError("x0 length does not match the model's species count");
  return cfg.x0;
}

}  // namespace cli_detail

/// simulate: SSA or tau-leap ensemble; endpoint CSV plus a moment summary.
inline int cmd_simulate(ExperimentConfig cfg, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  const ReactionNetwork net = load_model(cfg);
  require_seed(cfg);
  if (!(cfg.T > 0)) throw ConfigError("T must be > 0");
  if (cfg.n_samples < 0) throw ConfigError("n_samples must be >= 0");
  const State x0 = default_x0(cfg, net);

  std::vector<State> endpoints(static_cast<std::size_t>(cfg.n_samples));
  if (cfg.engine == "ssa") {
    endpoints = ssa_ensemble(net, x0, cfg.T, cfg.n_samples, *cfg.seed);
  } else if (cfg.engine == "tauleap") {
    require_decreasing_taus(cfg.tau_list);
    const TauLeapKernel kernel = kernel_by_name(cfg.kernel, net);
    const int steps = std::max(1, static_cast<int>(std::lround(cfg.T / cfg.tau_list.front())));
    const Mesh mesh = Mesh::uniform(cfg.T, steps);
    parallel_for(cfg.n_samples, [&](std::int64_t i) {
      Rng rng = Rng::stream(*cfg.seed, static_cast<std::uint64_t>(i));
      endpoints[static_cast<std::size_t>(i)] = simulate_mesh(kernel, net, x0, mesh, rng).back();
    });
  } else {
    throw ConfigError("engine must be 'ssa' or 'tauleap'");
  }

  std::filesystem::create_directories(cfg.out_dir);
  {
    auto csv = open_out(std::filesystem::path(cfg.out_dir) / "samples.csv");
    samples_to_csv(csv, net.species_names(), endpoints, cfg.config_hash);
  }

  Json summary = meta_json(cfg);
  summary["engine"] = cfg.engine;
  summary["seed"] = *cfg.seed;
  summary["T"] = cfg.T;
  summary["n_samples"] = cfg.n_samples;
  Json species = Json::array();
  const auto n = static_cast<double>(cfg.n_samples);
  for (int i = 0; i < net.num_species(); ++i) {
    double mean = 0, sq = 0;
    for (const auto& x : endpoints) {
      mean += static_cast<double>(x[i]);
      sq += static_cast<double>(x[i]) * static_cast<double>(x[i]);
    }
    Json entry{{"name", net.species_names()[i]}};
    if (cfg.n_samples > 0) {
      mean /= n;
      const double var = std::max(0.0, sq / n - mean * mean);
      const double half = 1.96 * std::sqrt(var / std::max(1.0, n - 1));
      entry["mean"] = mean;
      entry["variance"] = var;
      entry["mean_ci95"] = Json::array({mean - half, mean + half});
    }
    species.push_back(std::move(entry));
  }
  summary["species"] = std::move(species);
  {
    auto js = open_out(std::filesystem::path(cfg.out_dir) / "summary.json");
    js << summary.dump(2) << "\n";
  }
  out << "simulate: wrote " << cfg.n_samples << " samples to " << cfg.out_dir << "\n";
  (void)err;
  return kExitOk;
}

/// converge: mesh-refinement error study against the CME oracle.
inline int cmd_converge(ExperimentConfig cfg, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  const ReactionNetwork net = load_model(cfg);
  require_seed(cfg);
  require_decreasing_taus(cfg.tau_list);
  if (!(cfg.T > 0)) throw ConfigError("T must be > 0");
  if (!cfg.truncation) throw ConfigError("converge requires a truncation box");
  if (cfg.kernel.empty()) throw ConfigError("converge requires a kernel");
  const State x0 = default_x0(cfg, net);
  const TauLeapKernel kernel = kernel_by_name(cfg.kernel, net);

  ConvergenceOptions opts;
  opts.pushforward_tolerance = cfg.pushforward_tolerance;
  const ConvergenceReport report =
      convergence_experiment(net, kernel, SparsePmf::point_mass(x0), cfg.T, cfg.tau_list,
                             cfg.r_list, cfg.norm, *cfg.truncation, opts);

  std::filesystem::create_directories(cfg.out_dir);
  Json j = meta_json(cfg);
  j["kernel"] = cfg.kernel;
  j["report"] = to_json(report);
  {
    auto js = open_out(std::filesystem::path(cfg.out_dir) / "convergence.json");
    js << j.dump(2) << "\n";
  }
  {
    auto csv = open_out(std::filesystem::path(cfg.out_dir) / "convergence.csv");
    convergence_to_csv(csv, report, cfg.config_hash);
  }
  for (const auto& s : report.series) {
    out << "r=" << s.r;
    if (s.fitted)
      out << " fitted_order=" << format_double(s.fitted_order)
          << " stderr=" << format_double(s.slope_stderr);
    out << "\n";
  }
  if (!report.conclusive) {
    err << "converge: " << report.flag << "\n";
    return kExitInconclusive;
  }
  return kExitOk;
}

/// verify: growth classification, alpha certificate, conservativity,
/// pointwise consistency and step moment-growth certificates.
inline int cmd_verify(ExperimentConfig cfg, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  const ReactionNetwork net = load_model(cfg);
  require_seed(cfg);
  if (cfg.kernel.empty()) throw ConfigError("verify requires a kernel");
  const TauLeapKernel kernel = kernel_by_name(cfg.kernel, net);

  std::vector<Coord> upper = cfg.verify_upper;
  if (upper.empty()) upper.assign(net.num_species(), 10);
  if (static_cast<int>(upper.size()) != net.num_species())
    throw ConfigError("verify.box_upper length does not match the species count");

  Json j = meta_json(cfg);
  j["kernel"] = cfg.kernel;
  bool all_ok = true;

  const GrowthClassification growth = classify_growth(net);
  j["propensity_growth"] = to_json(growth);
  j["propensity_growth"]["verdict"] = "pass";  // polynomial forms by construction

  const auto alpha = find_alpha(net, cfg.alpha_bound);
  if (alpha) {
    j["alpha_certificate"] = to_json(*alpha);
    j["alpha_certificate"]["verdict"] = "pass";
  } else {
    j["alpha_certificate"] = Json{{"verdict", "infeasible"}};
    all_ok = false;
  }

  const auto conservative =
      check_conservative(net, std::vector<Coord>(net.num_species(), 0), upper);
  j["conservativity"] = to_json(conservative);
  j["conservativity"]["verdict"] = conservative.conservative ? "pass" : "fail";
  all_ok = all_ok && conservative.conservative;

  // states sampled inside the box, derived from the seed
  std::vector<State> states;
  Rng rng = Rng::stream(*cfg.seed, 1013);
  for (int s = 0; s < cfg.verify_states; ++s) {
    State x(net.num_species());
    for (int i = 0; i < net.num_species(); ++i)
      x[i] = static_cast<Coord>(rng.next_u64() % static_cast<std::uint64_t>(upper[i] + 1));
    states.push_back(std::move(x));
  }

  bool consistency_ok = true;
  Json cons = Json::array();
  for (const auto& x : states) {
    const auto report = consistency_check(kernel, net, x, cfg.q, cfg.consistency_tolerance);
    Json entry = to_json(report);
    entry["state"] = x;
    cons.push_back(std::move(entry));
    consistency_ok = consistency_ok && report.pass;
  }
  j["pointwise_consistency"] = Json{{"verdict", consistency_ok ? "pass" : "fail"},
                                      {"q", cfg.q},
                                      {"states", std::move(cons)}};
  all_ok = all_ok && consistency_ok;

  NormSpec growth_norm = cfg.norm;
  if (alpha) {
    std::vector<double> w(alpha->alpha.begin(), alpha->alpha.end());
    growth_norm = NormSpec::weighted(std::move(w));
  }
  bool growth_ok = true;
  Json ests = Json::array();
  for (int r : cfg.verify_r_list) {
    const auto est =
        estimate_tauleap_moment_growth(kernel, net, states, r, growth_norm, cfg.verify_tau_grid);
    growth_ok = growth_ok && est.certified && std::isfinite(est.lambda_hat);
    ests.push_back(to_json(est));
  }
  j["step_moment_growth"] =
      Json{{"verdict", growth_ok ? "certified-on-grid" : "fail"}, {"estimates", std::move(ests)}};
  all_ok = all_ok && growth_ok;

  const auto step_moments =
      step_moment_bound_check(kernel, net, cfg.l_list, cfg.verify_tau_grid, states);
  j["step_moment_bounds"] = to_json(step_moments);
  j["step_moment_bounds"]["verdict"] = step_moments.pass ? "pass" : "fail";
  all_ok = all_ok && step_moments.pass;

  j["verdict"] = all_ok ? "pass" : "fail";
  std::filesystem::create_directories(cfg.out_dir);
  {
    auto js = open_out(std::filesystem::path(cfg.out_dir) / "verify.json");
    js << j.dump(2) << "\n";
  }
  out << "verify: " << (all_ok ? "pass" : "fail") << "\n";
  if (!all_ok) {
    err << "verify: one or more checks failed (see verify.json)\n";
    return kExitInconclusive;
  }
  return kExitOk;
}

/// oracle: transient CME solve, pmf CSV plus metadata sidecar.
inline int cmd_oracle(ExperimentConfig cfg, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  const ReactionNetwork net = load_model(cfg);
  if (!cfg.truncation) throw ConfigError("oracle requires a truncation box");
  if (cfg.T < 0) throw ConfigError("T must be >= 0");
  const State x0 = default_x0(cfg, net);

  CmeSolution sol;
  try {
    sol = cme_solve(net, SparsePmf::point_mass(x0), cfg.T, *cfg.truncation);
  } catch (const TruncationError& e) {
    err << "oracle: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::domain_error& e) {
    err << "oracle: " << e.what() << "\n";
    return kExitInconclusive;
  }

  std::filesystem::create_directories(cfg.out_dir);
  {
    auto csv = open_out(std::filesystem::path(cfg.out_dir) / "pmf.csv");
    pmf_to_csv(csv, net.species_names(), sol.pmf, cfg.config_hash);
  }
  Json meta = meta_json(cfg);
  meta["time"] = cfg.T;
  meta["truncation_loss"] = sol.truncation_loss;
  meta["uniformization_rate"] = sol.uniformization_rate;
  meta["series_terms"] = sol.series_terms;
  if (cfg.seed) meta["seed"] = *cfg.seed;
  {
    auto js = open_out(std::filesystem::path(cfg.out_dir) / "pmf.meta.json");
    js << meta.dump(2) << "\n";
  }
  out << "oracle: loss " << format_double(sol.truncation_loss) << "\n";
  return kExitOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"taukit: simulation and verification toolkit for tau-leap methods"};
  app.require_subcommand(1);

  cli_detail::Overrides ov;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "JSON config file");
    sub->add_option("--model", ov.model, "model file (overrides config)");
    sub->add_option("--kernel", ov.kernel, "kernel name: explicit|midpoint|remm");
    sub->add_option("--out", ov.out, "output directory");
    sub->add_option("--tau", ov.tau_csv, "comma-separated tau list");
    sub->add_option("--r", ov.r_csv, "comma-separated moment orders");
    sub->add_option("--seed", ov.seed, "root seed");
    sub->add_option("--T", ov.T, "time horizon");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "sample SSA or tau-leap ensembles");
  CLI::App* converge = app.add_subcommand("converge", "mesh-refinement convergence study");
  CLI::App* verify = app.add_subcommand("verify", "check the convergence assumptions");
  CLI::App* oracle = app.add_subcommand("oracle", "truncated master-equation solve");
  for (CLI::App* sub : {simulate, converge, verify, oracle}) add_common(sub);

  std::vector<const char*> argv;
  argv.push_back("taukit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help itself; map real parse failures onto the config exit code
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ExperimentConfig cfg = cli_detail::load_config(ov);
    if (simulate->parsed()) return cmd_simulate(std::move(cfg), out, err);
    if (converge->parsed()) return cmd_converge(std::move(cfg), out, err);
    if (verify->parsed()) return cmd_verify(std::move(cfg), out, err);
    return cmd_oracle(std::move(cfg), out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const KernelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const EnumerationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace taukit::cli
