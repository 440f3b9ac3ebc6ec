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

// Command-line driver. Everything goes through the C API in dnms.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dnms/dnms.h"

namespace {

constexpr double kLn2 = 0.69314718055994530942;

struct PipelineFlags {
  dnms_pipeline_options opts{};
  std::string k = "adaptive";
  std::string log_domain = "auto";
  std::string entropy_unit = "nats";
  double entropy_threshold = 0.0;
};

int report_error(int status) {
  std::cerr << "error: " << dnms_last_error() << "\n";
  return status;
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return DNMS_INVALID_INPUT;
}

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f, bool with_k = true) {
  dnms_pipeline_options_init(&f.opts);
  f.entropy_threshold = f.opts.entropy_threshold;
  cmd->add_option("--tau", f.opts.tau, "Sinkhorn temperature")->capture_default_str();
  cmd->add_option("--iters", f.opts.iters, "Sinkhorn iterations")->capture_default_str();
  cmd->add_option("--tol", f.opts.tol, "early stop on marginal L1 violation")
      ->capture_default_str();
  cmd->add_option("--log-domain", f.log_domain, "log-domain Sinkhorn")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  cmd->add_option("--alpha", f.opts.alpha, "feature distance weight")->capture_default_str();
  cmd->add_option("--beta", f.opts.beta, "spatial distance weight")->capture_default_str();
  cmd->add_option("--gamma", f.opts.gamma, "score weight")->capture_default_str();
  cmd->add_option("--entropy-threshold", f.entropy_threshold,
                  "minimum entropy of the refined distribution")
      ->capture_default_str();
  cmd->add_option("--entropy-unit", f.entropy_unit, "unit of --entropy-threshold")
      ->check(CLI::IsMember({"nats", "bits"}))
      ->capture_default_str();
  cmd->add_option("--fw-max-iters", f.opts.fw_max_iters, "Frank-Wolfe iteration cap")
      ->capture_default_str();
  if (!with_k) return;
  cmd->add_option("--k", f.k,
                  "latent region count, or 'adaptive' (greedy-NMS survivor count; a stand-in "
                  "rule, not a learned estimator)")
      ->capture_default_str();
  cmd->add_option("--adaptive-iou", f.opts.adaptive_iou, "IoU threshold of the adaptive-K rule")
      ->capture_default_str();
  cmd->add_option("--adaptive-score-floor", f.opts.adaptive_score_floor,
                  "score floor of the adaptive-K rule")
      ->capture_default_str();
  cmd->add_option("--k-max", f.opts.adaptive_k_max, "upper bound of the adaptive-K rule")
      ->capture_default_str();
}

dnms_log_domain parse_domain(const std::string& s) {
  if (s == "on") return DNMS_LOG_DOMAIN_ON;
  if (s == "off") return DNMS_LOG_DOMAIN_OFF;
  return DNMS_LOG_DOMAIN_AUTO;
}

// Resolves the string-typed flags; returns an empty string or an error.
std::string finish_pipeline_flags(PipelineFlags& f) {
  f.opts.log_domain = parse_domain(f.log_domain);
  f.opts.entropy_threshold =
      f.entropy_unit == "bits" ? f.entropy_threshold * kLn2 : f.entropy_threshold;
  if (f.k == "adaptive") {
    f.opts.k = 0;
  } else {
    try {
      std::size_t used = 0;
      const int k = std::stoi(f.k, &used);
      if (used != f.k.size() || k < 1) return "--k must be a positive integer or 'adaptive'";
      f.opts.k = k;
    } catch (const std::exception&) {
      return "--k must be a positive integer or 'adaptive'";
    }
  }
  return {};
}

int emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  out << text;
  if (!out) return usage_error("cannot write " + output);
  return 0;
}

// Driver reports go to --output (or stdout); status becomes the exit code.
int finish_report(dnms_status st, dnms_report* rep, const std::string& output) {
  if (rep == nullptr) return report_error(st);
  const int w = emit(dnms_report_json(rep), output);
  dnms_report_free(rep);
  if (w != 0) return w;
  if (st != DNMS_OK) std::cerr << "check failed: " << dnms_last_error() << "\n";
  return st;
}

std::vector<double> parse_grid(const std::string& s, bool& ok) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  ok = true;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) ok = false;
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (out.empty()) ok = false;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentiable non-maximum suppression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dnms_version());

  // run
  PipelineFlags run_flags;
  std::string run_input, run_gt, run_output;
  bool run_timings = false;
  auto* run = app.add_subcommand("run", "run the pipeline on a proposal file");
  run->add_option("input", run_input, "proposal file")->required();
  run->add_option("--gt", run_gt, "ground-truth sidecar (enables training-mode refinement)");
  run->add_option("--output", run_output, "report path")->required();
  run->add_flag("--timings", run_timings, "include wall-clock timings in the report");
  add_pipeline_flags(run, run_flags);

  // synth
  dnms_synth_options synth_opts;
  dnms_synth_options_init(&synth_opts);
  std::string synth_output, synth_gt_output;
  auto* synth = app.add_subcommand("synth", "generate a synthetic proposal scene");
  synth->add_option("--regions", synth_opts.regions)->capture_default_str();
  synth->add_option("--per-region", synth_opts.per_region)->capture_default_str();
  synth->add_option("--jitter", synth_opts.jitter, "box jitter in pixels")->capture_default_str();
  synth->add_option("--score-noise", synth_opts.score_noise)->capture_default_str();
  synth->add_option("--feature-dim", synth_opts.feature_dim)->capture_default_str();
  synth->add_option("--width", synth_opts.image_width)->capture_default_str();
  synth->add_option("--height", synth_opts.image_height)->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth->add_option("--output", synth_output, "proposal file")->required();
  synth->add_option("--gt-output", synth_gt_output,
                    "ground-truth sidecar (default: <output>.gt.jsonl)");

  // gradcheck
  dnms_gradcheck_options gc_opts;
  dnms_gradcheck_options_init(&gc_opts);
  std::string gc_domain = "auto", gc_output;
  auto* gradcheck = app.add_subcommand("gradcheck", "compare gradients with finite differences");
  gradcheck->add_option("--m", gc_opts.m, "proposals")->capture_default_str();
  gradcheck->add_option("--k", gc_opts.k, "latent regions")->capture_default_str();
  gradcheck->add_option("--tau", gc_opts.tau)->capture_default_str();
  gradcheck->add_option("--iters", gc_opts.iters)->capture_default_str();
  gradcheck->add_option("--seed", gc_opts.seed)->capture_default_str();
  gradcheck->add_option("--fd-step", gc_opts.fd_step)->capture_default_str();
  gradcheck->add_option("--instances", gc_opts.instances)->capture_default_str();
  gradcheck->add_option("--lambda-kl", gc_opts.lambda_kl)->capture_default_str();
  gradcheck->add_option("--log-domain", gc_domain)
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  gradcheck->add_option("--output", gc_output, "report path (default: stdout)");

  // convergence
  dnms_convergence_options cv_opts;
  dnms_convergence_options_init(&cv_opts);
  std::string cv_grid = "0.5,1,2", cv_domain = "auto", cv_output;
  auto* convergence =
      app.add_subcommand("convergence", "check Sinkhorn contraction and Frank-Wolfe optimality");
  convergence->add_option("--max-m", cv_opts.max_m)->capture_default_str();
  convergence->add_option("--max-k", cv_opts.max_k)->capture_default_str();
  convergence->add_option("--tau-grid", cv_grid, "comma-separated temperatures")
      ->capture_default_str();
  convergence->add_option("--trials", cv_opts.trials, "instances per temperature")
      ->capture_default_str();
  convergence->add_option("--iters", cv_opts.iters, "observed Sinkhorn iterations")
      ->capture_default_str();
  convergence->add_option("--fw-trials", cv_opts.fw_trials)->capture_default_str();
  convergence->add_option("--seed", cv_opts.seed)->capture_default_str();
  convergence->add_option("--log-domain", cv_domain)
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  convergence->add_option("--output", cv_output, "report path (default: stdout)");

  // bench
  dnms_bench_options bench_opts;
  dnms_bench_options_init(&bench_opts);
  PipelineFlags bench_flags;
  std::string bench_output;
  auto* bench = app.add_subcommand("bench", "time dnms against greedy and soft NMS");
  bench->add_option("--m", bench_opts.m, "proposals")->capture_default_str();
  bench->add_option("--k", bench_opts.k, "latent regions")->capture_default_str();
  bench->add_option("--repetitions", bench_opts.repetitions)->capture_default_str();
  bench->add_option("--output", bench_output, "report path (default: stdout)");
  add_pipeline_flags(bench, bench_flags, false);

  for (auto* sub : {run, bench}) {
    sub->add_option("--seed", sub == run ? run_flags.opts.seed : bench_opts.seed)
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return DNMS_INVALID_INPUT;
  }

  if (run->parsed()) {
    if (std::string err = finish_pipeline_flags(run_flags); !err.empty()) return usage_error(err);
    if (!(run_flags.opts.tau > 0.0)) return usage_error("tau must be positive");
    dnms_proposal_set* set = nullptr;
    dnms_ground_truth* gt = nullptr;
    dnms_status st = dnms_proposals_read(run_input.c_str(), &set);
    if (st != DNMS_OK) return report_error(st);
    if (!run_gt.empty()) {
      st = dnms_ground_truth_read(run_gt.c_str(), &gt);
      if (st != DNMS_OK) {
        dnms_proposals_free(set);
        return report_error(st);
      }
    }
    dnms_result* result = nullptr;
    st = dnms_run(set, gt, &run_flags.opts, &result);
    dnms_proposals_free(set);
    dnms_ground_truth_free(gt);
    if (st != DNMS_OK) return report_error(st);
    st = dnms_result_write(result, run_output.c_str(), run_timings ? 1 : 0);
    const std::size_t k = dnms_result_count(result);
    dnms_result_free(result);
    if (st != DNMS_OK) return report_error(st);
    std::cout << "wrote " << k << " refined proposals to " << run_output << "\n";
    return 0;
  }

  if (synth->parsed()) {
    if (synth_gt_output.empty()) synth_gt_output = synth_output + ".gt.jsonl";
    dnms_proposal_set* set = nullptr;
    dnms_ground_truth* gt = nullptr;
    dnms_status st = dnms_synth(&synth_opts, &set, &gt);
    if (st != DNMS_OK) return report_error(st);
    st = dnms_proposals_write(set, synth_output.c_str());
    if (st == DNMS_OK) st = dnms_ground_truth_write(gt, synth_gt_output.c_str());
    const std::size_t n = dnms_proposals_count(set);
    dnms_proposals_free(set);
    dnms_ground_truth_free(gt);
    if (st != DNMS_OK) return report_error(st);
    std::cout << "wrote " << n << " proposals to " << synth_output << "\n";
    return 0;
  }

  if (gradcheck->parsed()) {
    gc_opts.log_domain = parse_domain(gc_domain);
    if (!(gc_opts.tau > 0.0)) return usage_error("tau must be positive");
    dnms_report* rep = nullptr;
    const dnms_status st = dnms_gradcheck(&gc_opts, &rep);
    return finish_report(st, rep, gc_output);
  }

  if (convergence->parsed()) {
    bool ok = false;
    const std::vector<double> taus = parse_grid(cv_grid, ok);
    if (!ok) return usage_error("--tau-grid must be a comma-separated list of numbers");
    cv_opts.taus = taus.data();
    cv_opts.num_taus = taus.size();
    cv_opts.log_domain = parse_domain(cv_domain);
    dnms_report* rep = nullptr;
    const dnms_status st = dnms_convergence(&cv_opts, &rep);
    return finish_report(st, rep, cv_output);
  }

  if (bench->parsed()) {
    if (std::string err = finish_pipeline_flags(bench_flags); !err.empty()) {
      return usage_error(err);
    }
    if (!(bench_flags.opts.tau > 0.0)) return usage_error("tau must be positive");
    bench_opts.iters = bench_flags.opts.iters;
    bench_opts.pipeline = bench_flags.opts;
    dnms_report* rep = nullptr;
    const dnms_status st = dnms_bench(&bench_opts, &rep);
    return finish_report(st, rep, bench_output);
  }
  return DNMS_INVALID_INPUT;
}
