#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "taukit/assumptions.hpp"
#include "taukit/consistency.hpp"
#include "taukit/convergence.hpp"
#include "taukit/lattice.hpp"
#include "taukit/sparse_pmf.hpp"
#include "taukit/version.hpp"

namespace taukit {

using Json = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Shortest round-trip decimal form, stable across runs.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv_header_comment(std::ostream& os, const std::string& config_hash) {
  os << "# taukit " << kVersion << " config=" << config_hash << "\n";
}

/// Pmf rows in lexicographic state order: species_1..species_N, weight.
inline void pmf_to_csv(std::ostream& os, const std::vector<std::string>& species,
                       const SparsePmf& pmf, const std::string& config_hash) {
  write_csv_header_comment(os, config_hash);
  for (std::size_t i = 0; i < species.size(); ++i) os << "species_" << (i + 1) << ",";
  os << "weight\n";
  for (const auto& [x, w] : pmf.sorted_entries()) {
    for (Coord c : x) os << c << ",";
    os << format_double(w) << "\n";
  }
}

inline void samples_to_csv(std::ostream& os, const std::vector<std::string>& species,
                           const std::vector<State>& samples, const std::string& config_hash) {
  write_csv_header_comment(os, config_hash);
  os << "sample";
  for (const auto& name : species) os << "," << name;
  os << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    os << i;
    for (Coord c : samples[i]) os << "," << c;
    os << "\n";
  }
}

inline Json to_json(const FitResult& fit) {
  return Json{{"order", fit.order}, {"stderr", fit.stderr_of_order}};
}

inline Json to_json(const ConvergenceReport& report) {
  Json j;
  j["taus"] = report.taus;
  j["oracle_loss"] = report.oracle_loss;
  j["pushforward_losses"] = report.pushforward_losses;
  j["conclusive"] = report.conclusive;
  if (!report.flag.empty()) j["flag"] = report.flag;
  j["series"] = Json::array();
  for (const auto& s : report.series) {
    Json js{{"r", s.r}, {"errors", s.errors}};
    if (s.fitted) {
      js["fitted_order"] = s.fitted_order;
      js["slope_stderr"] = s.slope_stderr;
    }
    j["series"].push_back(std::move(js));
  }
  return j;
}

inline void convergence_to_csv(std::ostream& os, const ConvergenceReport& report,
                               const std::string& config_hash) {
  write_csv_header_comment(os, config_hash);
  os << "tau";
  for (const auto& s : report.series) os << ",err_r" << s.r;
  os << ",pushforward_loss\n";
  for (std::size_t i = 0; i < report.taus.size(); ++i) {
    os << format_double(report.taus[i]);
    for (const auto& s : report.series) os << "," << format_double(s.errors[i]);
    os << "," << format_double(report.pushforward_losses[i]) << "\n";
  }
}

inline Json to_json(const GrowthClassification& g) {
  return Json{{"degrees", g.degrees},
              {"linearly_bounded", g.linearly_bounded},
              {"superlinear", g.superlinear},
              {"s_star", g.s_star}};
}

inline Json to_json(const AlphaCertificate& cert) {
  Json inner = Json::array();
  for (auto& [j, dot] : cert.checked_inner_products)
    inner.push_back(Json{{"reaction", j + 1}, {"inner_product", dot}});
  return Json{{"alpha", cert.alpha}, {"checked_inner_products", std::move(inner)}};
}

inline Json to_json(const ConservativityReport& report) {
  Json v = Json::array();
  for (const auto& violation : report.violations)
    v.push_back(Json{{"state", violation.x},
                     {"reaction", violation.reaction + 1},
                     {"rate", violation.rate}});
  return Json{{"conservative", report.conservative}, {"violations", std::move(v)}};
}

inline Json to_json(const ConsistencyReport& report) {
  Json j{{"max_residual", report.max_residual},
         {"threshold", report.threshold},
         {"pass", report.pass}};
  return j;
}

inline Json to_json(const MomentGrowthEstimate& est) {
  Json grid = Json::array();
  for (auto& [t, v] : est.evidence) grid.push_back(Json{{"t", t}, {"value", v}});
  return Json{{"r", est.r},
              {"lambda_hat", est.lambda_hat},
              {"method", est.method},
              {"base", est.base},
              {"certified", est.certified},
              {"evidence", std::move(grid)}};
}

inline Json to_json(const StepMomentReport& report) {
  Json series = Json::array();
  for (const auto& s : report.series)
    series.push_back(Json{
        {"l", s.l}, {"beta", s.beta}, {"tau_slope", s.tau_slope}, {"pass", s.pass}});
  return Json{{"pass", report.pass}, {"series", std::move(series)}};
}

}  // namespace taukit
