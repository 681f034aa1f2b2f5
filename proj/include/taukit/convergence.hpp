#pragma once

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "taukit/cme.hpp"
#include "taukit/lattice.hpp"
#include "taukit/mesh.hpp"
#include "taukit/metrics.hpp"
#include "taukit/sparse_pmf.hpp"
#include "taukit/tau_leap.hpp"

namespace taukit {

struct FitResult {
  double order = 0;
  double stderr_of_order = 0;
};

/// Least-squares slope of log err against log tau. Any non-positive error is
/// a degenerate exact match and yields the +infinity sentinel.
inline FitResult fit_order(const std::vector<std::pair<double, double>>& tau_err) {
  const std::size_t n = tau_err.size();
  if (n < 3) throw std::invalid_argument("fit_order: need at least 3 points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(tau_err[i].first < tau_err[i - 1].first))
      throw std::invalid_argument("fit_order: tau values must be strictly decreasing");
  for (auto& [tau, err] : tau_err)
    if (!(err > 0)) return {std::numeric_limits<double>::infinity(), 0.0};

  double sx = 0, sy = 0;
  for (auto& [tau, err] : tau_err) {
    sx += std::log(tau);
    sy += std::log(err);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (auto& [tau, err] : tau_err) {
    const double dx = std::log(tau) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0;
  for (auto& [tau, err] : tau_err) {
    const double resid = (std::log(err) - my) - slope * (std::log(tau) - mx);
    ssr += resid * resid;
  }
  const double var = std::max(0.0, ssr / static_cast<double>(n - 2));
  return {slope, std::sqrt(var / sxx)};
}

struct ConvergenceSeries {
  int r = 0;
  std::vector<double> errors;  // per tau, moment variation of p_hat - p
  bool fitted = false;
  double fitted_order = 0;
  double slope_stderr = 0;
};

struct ConvergenceReport {
  std::vector<double> taus;          // effective max step sizes, decreasing
  std::vector<ConvergenceSeries> series;
  std::vector<double> pushforward_losses;  // per tau
  double oracle_loss = 0;                  // CME truncation loss at T
  bool conclusive = true;
  std::string flag;
};

struct ConvergenceOptions {
  double pushforward_tolerance = 1e-9;
  TauLeapOptions tau_opts;
  bool parallel = true;
};

/// Mesh-refinement experiment: for each tau, pushes p0 through the uniform
/// mesh and measures |p_hat(T) - p(T)|_r against the CME oracle, then fits
/// the convergence order per r. Errors within an order of magnitude of the
/// combined truncation losses make the experiment inconclusive.
inline ConvergenceReport convergence_experiment(const ReactionNetwork& net,
                                                const TauLeapKernel& kernel, const SparsePmf& p0,
                                                double T, const std::vector<double>& tau_list,
                                                const std::vector<int>& r_list,
                                                const NormSpec& norm, const TruncationSpec& trunc,
                                                const ConvergenceOptions& opts = {}) {
  if (tau_list.empty()) throw std::invalid_argument("convergence_experiment: empty tau list");
  for (std::size_t i = 1; i < tau_list.size(); ++i)
    if (!(tau_list[i] < tau_list[i - 1]))
      throw std::invalid_argument("convergence_experiment: tau list must be strictly decreasing");
  if (!(T > 0)) throw std::invalid_argument("convergence_experiment: T must be > 0");

  const CmeSolution oracle = cme_solve(net, p0, T, trunc);

  ConvergenceReport report;
  report.oracle_loss = oracle.truncation_loss;
  report.taus.resize(tau_list.size());
  report.pushforward_losses.resize(tau_list.size());
  std::vector<SparsePmf> diffs(tau_list.size());

  auto run_tau = [&](std::size_t i) {
    const int steps = std::max(1, static_cast<int>(std::lround(T / tau_list[i])));
    const Mesh mesh = Mesh::uniform(T, steps);
    report.taus[i] = mesh.max_step();
    const PushForwardResult pf =
        push_forward(kernel, net, p0, mesh, opts.pushforward_tolerance, opts.tau_opts);
    report.pushforward_losses[i] = pf.loss;
    diffs[i] = difference(pf.pmf, oracle.pmf);
  };
  if (opts.parallel) {
    std::vector<std::future<void>> futs;
    for (std::size_t i = 0; i < tau_list.size(); ++i)
      futs.push_back(std::async(std::launch::async, run_tau, i));
    for (auto& f : futs) f.get();
  } else {
    for (std::size_t i = 0; i < tau_list.size(); ++i) run_tau(i);
  }

  double min_error = std::numeric_limits<double>::infinity();
  for (int r : r_list) {
    ConvergenceSeries series;
    series.r = r;
    for (auto& d : diffs) series.errors.push_back(moment_variation(d, r, norm));
    if (tau_list.size() >= 3) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < tau_list.size(); ++i)
        pts.emplace_back(report.taus[i], series.errors[i]);
      const FitResult fit = fit_order(pts);
      series.fitted = true;
      series.fitted_order = fit.order;
      series.slope_stderr = fit.stderr_of_order;
    } else {
      report.flag = "too few tau values to fit an order";
    }
    for (double e : series.errors) min_error = std::min(min_error, e);
    report.series.push_back(std::move(series));
  }

  double max_loss = report.oracle_loss;
  for (double l : report.pushforward_losses) max_loss = std::max(max_loss, l + report.oracle_loss);
  if (max_loss > 0.1 * min_error) {
    report.conclusive = false;
    report.flag = "errors dominated by truncation losses";
  }
  return report;
}

}  // namespace taukit
