/* Copyright 2026 The DNMS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dnms/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "dnms/error.hpp"
#include "dnms/hungarian.hpp"
#include "dnms/losses.hpp"
#include "dnms/refine.hpp"
#include "dnms/rng.hpp"

namespace dnms::harness {
namespace {

using json = nlohmann::ordered_json;

// Gradient checks differentiate exactly `iters` iterations, so early stopping
// is disabled.
constexpr double kNoEarlyStop = std::numeric_limits<double>::min();

std::string domain_name(DomainMode d) {
  switch (d) {
    case DomainMode::kLog: return "on";
    case DomainMode::kLinear: return "off";
    case DomainMode::kAuto: break;
  }
  return "auto";
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo,
                     double hi) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

double relative_error(const Matrix& analytic, const Matrix& numeric) {
  const double scale = std::max(numeric.cwiseAbs().maxCoeff(), 1e-12);
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

double gradcheck_threshold(double tau) {
  if (tau >= 0.5) return 1e-4;
  if (tau >= 0.1) return 1e-3;
  return 1e-2;
}

GradcheckReport run_gradcheck(const GradcheckOptions& opt) {
  if (opt.m < 1 || opt.k < 1) throw InvalidInput("sizes must be positive");
  if (!(opt.tau > 0.0)) throw InvalidInput("tau must be positive");
  if (opt.iters < 1) throw InvalidInput("iters must be at least 1");
  if (!(opt.fd_step > 0.0)) throw InvalidInput("fd step must be positive");
  if (opt.instances < 1) throw InvalidInput("instances must be at least 1");

  SinkhornParams params{opt.tau, opt.iters, kNoEarlyStop, opt.domain};
  const Marginals marg = Marginals::uniform(opt.m, opt.k);

  GradcheckReport rep;
  rep.threshold = gradcheck_threshold(opt.tau);
  json rows = json::array();
  for (int i = 0; i < opt.instances; ++i) {
    const std::uint64_t s = opt.seed * 1000003ULL + static_cast<std::uint64_t>(i);
    const Matrix C = random_matrix(opt.m, opt.k, 2 * s);
    const Matrix G = random_matrix(opt.m, opt.k, 2 * s + 1, -1.0, 1.0);

    const Matrix g_unrolled = grad_unrolled(C, params, marg, G);
    const Matrix fd_unrolled = finite_difference(C, opt.fd_step, [&](const Matrix& c) {
      return G.cwiseProduct(solve(c, params, marg).S).sum();
    });
    const double err_u = relative_error(g_unrolled, fd_unrolled);

    const Assignment pstar = hungarian_solve(C);
    const Matrix g_match = grad_matching_wrt_cost(C, params, marg, pstar, opt.lambda_kl);
    const Matrix fd_match = finite_difference(C, opt.fd_step, [&](const Matrix& c) {
      return matching_loss(c, solve(c, params, marg).S, pstar, opt.lambda_kl);
    });
    const double err_m = relative_error(g_match, fd_match);

    rep.max_error_unrolled = std::max(rep.max_error_unrolled, err_u);
    rep.max_error_matching = std::max(rep.max_error_matching, err_m);
    rows.push_back(json{{"instance", i}, {"error_unrolled", err_u}, {"error_matching", err_m}});
  }
  rep.pass = rep.max_error_unrolled < rep.threshold && rep.max_error_matching < rep.threshold;

  std::string note;
  if (!rep.pass) {
    note = opt.fd_step > 1e-2 * opt.tau
               ? "finite-difference step is large relative to tau; central differences are "
                 "only accurate for steps much smaller than tau"
               : "gradient mismatch exceeds the threshold";
  }
  json doc{{"command", "gradcheck"},
           {"options",
            {{"m", opt.m},
             {"k", opt.k},
             {"tau", opt.tau},
             {"iters", opt.iters},
             {"seed", opt.seed},
             {"fd_step", opt.fd_step},
             {"instances", opt.instances},
             {"lambda_kl", opt.lambda_kl},
             {"log_domain", domain_name(opt.domain)}}},
           {"error_metric", "max_abs_diff / max_abs_fd"},
           {"threshold", rep.threshold},
           {"instances", rows},
           {"max_error_unrolled", rep.max_error_unrolled},
           {"max_error_matching", rep.max_error_matching},
           {"pass", rep.pass}};
  if (!note.empty()) doc["note"] = note;
  rep.json = doc.dump(2) + "\n";
  return rep;
}

ConvergenceReport run_convergence(const ConvergenceOptions& opt) {
  if (opt.max_m < 1 || opt.max_k < 1) throw InvalidInput("sizes must be positive");
  if (opt.trials < 1) throw InvalidInput("trials must be at least 1");
  if (opt.taus.empty()) throw InvalidInput("tau grid is empty");
  for (double t : opt.taus) {
    if (!(t > 0.0)) throw InvalidInput("tau must be positive");
  }
  if (opt.iters < 2) throw InvalidInput("iters must be at least 2");
  if (opt.fw_trials < 0) throw InvalidInput("fw trials must be nonnegative");

  ConvergenceReport rep;
  Rng rng(opt.seed);
  json rows = json::array();
  for (double tau : opt.taus) {
    for (int trial = 0; trial < opt.trials; ++trial) {
      const auto M = static_cast<Eigen::Index>(1 + rng.index(static_cast<std::size_t>(opt.max_m)));
      const auto K = static_cast<Eigen::Index>(1 + rng.index(static_cast<std::size_t>(opt.max_k)));
      const Matrix C = random_matrix(M, K, rng.next());
      const SinkhornParams params{tau, opt.iters, kNoEarlyStop, opt.domain};
      const ContractionReport c = verify_contraction(C, params, Marginals::uniform(M, K));
      ++rep.contraction_checks;
      if (!c.pass) ++rep.contraction_failures;
      rows.push_back(json{{"tau", tau},
                          {"trial", trial},
                          {"m", M},
                          {"k", K},
                          {"kappa", c.kappa},
                          {"rho", c.rho},
                          {"ratios_checked", c.ratios.size()},
                          {"max_ratio", c.max_ratio},
                          {"pass", c.pass}});
    }
  }

  json fw_failures = json::array();
  for (int trial = 0; trial < opt.fw_trials; ++trial) {
    const auto K = static_cast<Eigen::Index>(2 + rng.index(static_cast<std::size_t>(std::max(1, opt.max_k - 1))));
    Vector q(K);
    for (auto& x : q) x = rng.uniform01();
    RefineParams rp;
    rp.tau_h = rng.uniform01() * std::log(static_cast<double>(K));
    const FrankWolfeResult fw = frank_wolfe(q, rp);
    const double best = q.dot(lmo_entropy(q, rp).s);
    const std::size_t at = std::min<std::size_t>(2, fw.objective_trace.size() - 1);
    const double scale = q.cwiseAbs().maxCoeff();
    const bool ok = entropy(fw.p) >= rp.tau_h - rp.bisect_eps &&
                    std::abs(fw.p.sum() - 1.0) <= 1e-10 &&
                    std::abs(fw.objective_trace[at] - best) <= 1e-6 * scale &&
                    duality_gap(fw.p, q, rp) <= rp.bisect_eps * scale;
    ++rep.fw_checks;
    if (!ok) {
      ++rep.fw_failures;
      fw_failures.push_back(json{{"trial", trial}, {"k", K}, {"tau_h", rp.tau_h}});
    }
  }

  rep.pass = rep.contraction_failures == 0 && rep.fw_failures == 0;
  json doc{{"command", "convergence"},
           {"options",
            {{"max_m", opt.max_m},
             {"max_k", opt.max_k},
             {"taus", opt.taus},
             {"trials", opt.trials},
             {"iters", opt.iters},
             {"seed", opt.seed},
             {"log_domain", domain_name(opt.domain)},
             {"fw_trials", opt.fw_trials}}},
           {"contraction",
            {{"checks", rep.contraction_checks},
             {"failures", rep.contraction_failures},
             {"slack", kContractionSlack},
             {"rows", rows}}},
           {"frank_wolfe",
            {{"checks", rep.fw_checks}, {"failures", rep.fw_failures}, {"failed", fw_failures}}},
           {"pass", rep.pass}};
  rep.json = doc.dump(2) + "\n";
  return rep;
}

BenchReport run_bench(const BenchOptions& opt) {
  if (opt.m < 1 || opt.k < 1) throw InvalidInput("sizes must be positive");
  if (opt.iters < 1) throw InvalidInput("iters must be at least 1");
  if (opt.repetitions < 1) throw InvalidInput("repetitions must be at least 1");

  SynthConfig sc;
  sc.num_regions = std::min(opt.k, opt.m);
  sc.proposals_per_region = (opt.m + sc.num_regions - 1) / sc.num_regions;
  sc.seed = opt.seed;
  auto [set, gt] = synth_generate(sc);
  set.proposals.resize(static_cast<std::size_t>(opt.m));

  PipelineConfig cfg = opt.pipeline;
  cfg.sinkhorn.iters = opt.iters;
  cfg.k = KMode::fixed(static_cast<std::size_t>(sc.num_regions));

  std::vector<double> t_dnms, t_greedy, t_soft;
  std::vector<MethodMetrics> first;
  for (int r = 0; r < opt.repetitions; ++r) {
    auto metrics = compare(set, gt, cfg);
    t_dnms.push_back(metrics[0].wall_ms);
    t_greedy.push_back(metrics[1].wall_ms);
    t_soft.push_back(metrics[2].wall_ms);
    if (r == 0) first = std::move(metrics);
  }

  BenchReport rep;
  rep.dnms_median_ms = median(t_dnms);
  rep.greedy_median_ms = median(t_greedy);
  rep.soft_median_ms = median(t_soft);

  json methods = json::array();
  for (const auto& m : first) {
    methods.push_back(json{{"method", m.method}, {"mean_quality", m.mean_quality}, {"count", m.count}});
  }
  json doc{{"command", "bench"},
           {"options",
            {{"m", opt.m},
             {"k", opt.k},
             {"iters", opt.iters},
             {"repetitions", opt.repetitions},
             {"seed", opt.seed},
             {"tau", cfg.sinkhorn.tau}}},
           {"scene", {{"proposals", set.size()}, {"regions", sc.num_regions}}},
           {"methods", methods},
           {"timings_ms",
            {{"dnms_median", rep.dnms_median_ms},
             {"greedy_nms_median", rep.greedy_median_ms},
             {"soft_nms_median", rep.soft_median_ms}}}};
  rep.json = doc.dump(2) + "\n";
  return rep;
}

}  // namespace dnms::harness
