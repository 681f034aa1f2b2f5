#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "taukit/cli.hpp"

using namespace taukit;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "taukit_cli_tests";

std::string models_dir() { return TAUKIT_MODELS_DIR; }

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct WorkspaceGuard {
  WorkspaceGuard() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};
const WorkspaceGuard guard;

}  // namespace

TEST_CASE("missing model file exits with the config code") {
  std::string err;
  const int code = run_cli({"simulate", "--model", (kWork / "nope.model").string(), "--seed", "1"},
                           nullptr, &err);
  CHECK(code == 2);
  CHECK(err.find("cannot open file") != std::string::npos);
}

TEST_CASE("config and model syntax errors exit with the config code") {
  const fs::path bad_json = kWork / "bad.json";
  write_file(bad_json, "{ not json");
  CHECK(run_cli({"simulate", "--config", bad_json.string()}) == 2);

  const fs::path bad_model = kWork / "bad.model";
  write_file(bad_model, "species A\nreaction r: A -> B @ mass_action 1\n");
  const fs::path cfg = kWork / "bad_model.json";
  write_file(cfg, std::string("{\"model\":\"") + bad_model.string() +
                      "\",\"x0\":[1],\"seed\":1,\"n_samples\":1,\"out\":\"" +
                      (kWork / "bm_out").string() + "\"}");
  std::string err;
  CHECK(run_cli({"simulate", "--config", cfg.string()}, nullptr, &err) == 2);
  CHECK(err.find("unknown species") != std::string::npos);

  CHECK(run_cli({"simulate", "--model", models_dir() + std::string("/decay.model")}) == 2);
}

TEST_CASE("simulate with zero samples writes an empty csv with a header") {
  const fs::path outdir = kWork / "empty";
  const fs::path cfg = kWork / "empty.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/decay.model\",\"x0\":[5],\"T\":1.0,\"seed\":7,\"n_samples\":0,"
                      "\"out\":\"" + outdir.string() + "\"}");
  CHECK(run_cli({"simulate", "--config", cfg.string()}) == 0);
  const std::string csv = slurp(outdir / "samples.csv");
  CHECK(csv.find("sample,A\n") != std::string::npos);
  CHECK(csv.rfind("sample,A\n") + 9 == csv.size());  // header is the last line
}

TEST_CASE("simulate reproduces the decay mean within three sigma") {
  const fs::path outdir = kWork / "decay_sim";
  const fs::path cfg = kWork / "decay_sim.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/decay.model\",\"x0\":[10],\"T\":1.0,\"seed\":99,\"n_samples\":10000,"
                      "\"out\":\"" + outdir.string() + "\"}");
  CHECK(run_cli({"simulate", "--config", cfg.string()}) == 0);
  const auto summary = nlohmann::json::parse(slurp(outdir / "summary.json"));
  const double mean = summary.at("species")[0].at("mean").get<double>();
  // X(T) is the binomial thinning of 10 with p = e^{-1}
  const double expected = 10 * std::exp(-1.0);
  const double sigma = std::sqrt(expected * (1 - std::exp(-1.0)) / 10000.0);
  CHECK(std::abs(mean - expected) < 3 * sigma);
  CHECK(summary.at("seed").get<std::uint64_t>() == 99);
}

TEST_CASE("simulate runs tau-leap ensembles") {
  const fs::path outdir = kWork / "leap_sim";
  const fs::path cfg = kWork / "leap_sim.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/pair_birth_death.model\",\"x0\":[5,5,5],\"T\":0.5,\"seed\":12,"
                      "\"engine\":\"tauleap\",\"kernel\":\"remm\",\"tau_list\":[0.125],"
                      "\"n_samples\":500,\"out\":\"" + outdir.string() + "\"}");
  CHECK(run_cli({"simulate", "--config", cfg.string()}) == 0);
  const std::string csv = slurp(outdir / "samples.csv");
  CHECK(csv.find("sample,S1,S2,S3") != std::string::npos);
}

TEST_CASE("oracle echoes the initial condition at T=0") {
  const fs::path outdir = kWork / "oracle0";
  const fs::path cfg = kWork / "oracle0.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/decay.model\",\"x0\":[3],\"T\":0.0,\"seed\":1,"
                      "\"truncation\":{\"lower\":[0],\"upper\":[5],\"mass_tolerance\":1e-10},"
                      "\"out\":\"" + outdir.string() + "\"}");
  CHECK(run_cli({"oracle", "--config", cfg.string()}) == 0);
  const std::string csv = slurp(outdir / "pmf.csv");
  CHECK(csv.find("3,1\n") != std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(outdir / "pmf.meta.json"));
  CHECK(meta.at("truncation_loss").get<double>() == 0.0);
}

TEST_CASE("oracle matches the decay closed form and flags tiny boxes") {
  const fs::path outdir = kWork / "oracle_decay";
  const fs::path cfg = kWork / "oracle_decay.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/decay.model\",\"x0\":[1],\"T\":0.7,\"seed\":1,"
                      "\"truncation\":{\"lower\":[0],\"upper\":[1],\"mass_tolerance\":1e-12},"
                      "\"out\":\"" + outdir.string() + "\"}");
  CHECK(run_cli({"oracle", "--config", cfg.string()}) == 0);
  const std::string csv = slurp(outdir / "pmf.csv");
  // row "1,<weight>" carries e^{-0.7}
  const auto pos = csv.find("\n1,");
  REQUIRE(pos != std::string::npos);
  const double w = std::stod(csv.substr(pos + 3));
  CHECK(w == doctest::Approx(std::exp(-0.7)).epsilon(1e-9));

  const fs::path cfg2 = kWork / "oracle_tiny.json";
  write_file(cfg2, std::string("{\"model\":\"") + models_dir() +
                       "/pure_birth.model\",\"x0\":[0],\"T\":1.0,\"seed\":1,"
                       "\"truncation\":{\"lower\":[0],\"upper\":[3],\"mass_tolerance\":1e-10},"
                       "\"out\":\"" + (kWork / "oracle_tiny").string() + "\"}");
  std::string err;
  CHECK(run_cli({"oracle", "--config", cfg2.string()}, nullptr, &err) == 3);
  CHECK(err.find("truncation box too small") != std::string::npos);
}

TEST_CASE("converge runs, writes reports and honors flag overrides") {
  const fs::path outdir = kWork / "converge";
  const fs::path cfg = kWork / "converge.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/decay.model\",\"kernel\":\"explicit\",\"x0\":[8],\"T\":2.0,\"seed\":5,"
                      "\"tau_list\":[0.5,0.25,0.125,0.0625],\"r_list\":[0],"
                      "\"truncation\":{\"lower\":[0],\"upper\":[8],\"mass_tolerance\":1e-9},"
                      "\"out\":\"" + outdir.string() + "\"}");
  // the --T flag overrides the config horizon
  std::string out;
  CHECK(run_cli({"converge", "--config", cfg.string(), "--T", "1.0"}, &out) == 0);
  const auto j = nlohmann::json::parse(slurp(outdir / "convergence.json"));
  CHECK(j.at("report").at("conclusive").get<bool>());
  const double order = j.at("report").at("series")[0].at("fitted_order").get<double>();
  CHECK(order > 0.7);
  CHECK(order < 1.4);
  CHECK(out.find("fitted_order") != std::string::npos);
  const std::string csv = slurp(outdir / "convergence.csv");
  CHECK(csv.find("tau,err_r0,pushforward_loss") != std::string::npos);

  // single tau: flagged but exit 0
  const fs::path out1 = kWork / "converge1";
  CHECK(run_cli({"converge", "--config", cfg.string(), "--T", "1.0", "--tau", "0.25", "--out",
                 out1.string()}) == 0);
  const auto j1 = nlohmann::json::parse(slurp(out1 / "convergence.json"));
  CHECK(j1.at("report").at("flag").get<std::string>() == "too few tau values to fit an order");
}

TEST_CASE("converge exits with code 3 when losses dominate the errors") {
  // explicit tau is distributionally exact on the pure-birth net, so the
  // residual error is truncation noise and the guard must trip
  const fs::path outdir = kWork / "converge_guard";
  const fs::path cfg = kWork / "converge_guard.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/pure_birth.model\",\"kernel\":\"explicit\",\"x0\":[0],\"T\":1.0,"
                      "\"seed\":5,\"tau_list\":[0.5,0.25,0.125],\"r_list\":[0],"
                      "\"truncation\":{\"lower\":[0],\"upper\":[25],\"mass_tolerance\":1e-6},"
                      "\"out\":\"" + outdir.string() + "\"}");
  std::string err;
  CHECK(run_cli({"converge", "--config", cfg.string()}, nullptr, &err) == 3);
  CHECK(err.find("dominated") != std::string::npos);
}

TEST_CASE("verify passes on the shipped pair model with remm") {
  const fs::path outdir = kWork / "verify";
  const fs::path cfg = kWork / "verify.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/pair_birth_death.model\",\"kernel\":\"remm\",\"seed\":3,"
                      "\"verify\":{\"box_upper\":[8,12,8],\"n_states\":6},"
                      "\"out\":\"" + outdir.string() + "\"}");
  std::string out;
  CHECK(run_cli({"verify", "--config", cfg.string()}, &out) == 0);
  CHECK(out.find("pass") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(outdir / "verify.json"));
  CHECK(j.at("verdict").get<std::string>() == "pass");
  CHECK(j.at("alpha_certificate").at("alpha") == nlohmann::json::array({1, 1, 1}));
  CHECK(j.at("pointwise_consistency").at("verdict").get<std::string>() == "pass");
  CHECK(j.at("step_moment_growth").at("verdict").get<std::string>() ==
        "certified-on-grid");
}

TEST_CASE("verify flags a conservativity violation") {
  const fs::path model = kWork / "const_drain.model";
  write_file(model, "species A\nreaction drain: A -> 0 @ polynomial 2.0\n");
  const fs::path outdir = kWork / "verify_bad";
  const fs::path cfg = kWork / "verify_bad.json";
  write_file(cfg, std::string("{\"model\":\"") + model.string() +
                      "\",\"kernel\":\"explicit\",\"seed\":3,"
                      "\"verify\":{\"box_upper\":[6],\"n_states\":4},"
                      "\"out\":\"" + outdir.string() + "\"}");
  std::string err;
  CHECK(run_cli({"verify", "--config", cfg.string()}, nullptr, &err) == 3);
  const auto j = nlohmann::json::parse(slurp(outdir / "verify.json"));
  CHECK(j.at("conservativity").at("verdict").get<std::string>() == "fail");
}

TEST_CASE("unknown kernel is a config error") {
  CHECK(run_cli({"verify", "--model", models_dir() + std::string("/decay.model"), "--kernel",
                 "bogus", "--seed", "1"}) == 2);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  const fs::path outdir = kWork / "repeat";
  const fs::path cfg = kWork / "repeat.json";
  write_file(cfg, std::string("{\"model\":\"") + models_dir() +
                      "/pair_birth_death.model\",\"x0\":[5,5,5],\"T\":0.5,\"seed\":11,"
                      "\"n_samples\":2000,\"out\":\"" + outdir.string() + "\"}");
  CHECK(run_cli({"simulate", "--config", cfg.string()}) == 0);
  const std::string csv1 = slurp(outdir / "samples.csv");
  const std::string json1 = slurp(outdir / "summary.json");
  CHECK(run_cli({"simulate", "--config", cfg.string()}) == 0);
  CHECK(slurp(outdir / "samples.csv") == csv1);
  CHECK(slurp(outdir / "summary.json") == json1);
}
