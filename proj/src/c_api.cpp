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

#include "dnms/dnms.h"

#include <chrono>
#include <exception>
#include <new>
#include <string>

#include "dnms/error.hpp"
#include "dnms/harness.hpp"
#include "dnms/io.hpp"
#include "dnms/pipeline.hpp"

struct dnms_proposal_set {
  dnms::ProposalSet value;
};

struct dnms_ground_truth {
  dnms::GroundTruth value;
};

struct dnms_result {
  dnms::io::RunReport report;
};

struct dnms_report {
  std::string json;
  bool passed = false;
};

namespace {

thread_local std::string g_last_error;

dnms_status fail(dnms_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Maps exceptions escaping the C++ core onto status codes.
template <typename F>
dnms_status guarded(F&& body) {
  try {
    return body();
  } catch (const dnms::InvalidInput& e) {
    return fail(DNMS_INVALID_INPUT, e.what());
  } catch (const dnms::NumericalFailure& e) {
    return fail(DNMS_NUMERICAL_FAILURE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DNMS_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(DNMS_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(DNMS_INTERNAL_ERROR, "unknown error");
  }
}

dnms::DomainMode to_domain(dnms_log_domain d) {
  switch (d) {
    case DNMS_LOG_DOMAIN_ON: return dnms::DomainMode::kLog;
    case DNMS_LOG_DOMAIN_OFF: return dnms::DomainMode::kLinear;
    case DNMS_LOG_DOMAIN_AUTO: break;
  }
  return dnms::DomainMode::kAuto;
}

dnms::PipelineConfig to_config(const dnms_pipeline_options& o) {
  if (!(o.tau > 0.0)) throw dnms::InvalidInput("tau must be positive");
  if (o.iters < 1) throw dnms::InvalidInput("iters must be at least 1");
  if (!(o.tol > 0.0)) throw dnms::InvalidInput("tol must be positive");
  if (!(o.entropy_threshold >= 0.0)) {
    throw dnms::InvalidInput("entropy threshold must be nonnegative");
  }
  if (o.fw_max_iters < 1) throw dnms::InvalidInput("fw max iters must be at least 1");
  if (o.k < 0) throw dnms::InvalidInput("k must be positive or 0 for adaptive");
  if (o.k == 0 && o.adaptive_k_max < 1) throw dnms::InvalidInput("k_max must be positive");

  dnms::PipelineConfig c;
  c.sinkhorn.tau = o.tau;
  c.sinkhorn.iters = o.iters;
  c.sinkhorn.tol = o.tol;
  c.sinkhorn.domain = to_domain(o.log_domain);
  c.weights = {o.alpha, o.beta, o.gamma};
  c.refine.tau_h = o.entropy_threshold;
  c.refine.max_iters = o.fw_max_iters;
  if (o.k == 0) {
    c.k.adaptive = true;
    c.k.rule = {o.adaptive_iou, o.adaptive_score_floor, static_cast<std::size_t>(o.adaptive_k_max)};
  } else {
    c.k = dnms::KMode::fixed(static_cast<std::size_t>(o.k));
  }
  c.seed = o.seed;
  return c;
}

dnms_status null_arg(const char* name) {
  return fail(DNMS_INVALID_INPUT, std::string(name) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* dnms_version(void) { return "1.0.0"; }

const char* dnms_last_error(void) { return g_last_error.c_str(); }

void dnms_pipeline_options_init(dnms_pipeline_options* o) {
  if (o == nullptr) return;
  const dnms::PipelineConfig d;
  o->tau = d.sinkhorn.tau;
  o->iters = d.sinkhorn.iters;
  o->tol = d.sinkhorn.tol;
  o->log_domain = DNMS_LOG_DOMAIN_AUTO;
  o->alpha = d.weights.alpha;
  o->beta = d.weights.beta;
  o->gamma = d.weights.gamma;
  o->entropy_threshold = d.refine.tau_h;
  o->fw_max_iters = d.refine.max_iters;
  o->k = 0;
  o->adaptive_iou = d.k.rule.iou_thresh;
  o->adaptive_score_floor = d.k.rule.score_floor;
  o->adaptive_k_max = static_cast<int>(d.k.rule.k_max);
  o->seed = d.seed;
}

void dnms_synth_options_init(dnms_synth_options* o) {
  if (o == nullptr) return;
  const dnms::SynthConfig d;
  *o = {d.num_regions, d.proposals_per_region, d.jitter, d.score_noise,
        d.feature_dim, d.image_width,          d.image_height, d.seed};
}

void dnms_gradcheck_options_init(dnms_gradcheck_options* o) {
  if (o == nullptr) return;
  const dnms::harness::GradcheckOptions d;
  *o = {d.m, d.k, d.tau, d.iters, d.seed, d.fd_step, d.instances, d.lambda_kl,
        DNMS_LOG_DOMAIN_AUTO};
}

void dnms_convergence_options_init(dnms_convergence_options* o) {
  if (o == nullptr) return;
  static const double kDefaultTaus[] = {0.5, 1.0, 2.0};
  const dnms::harness::ConvergenceOptions d;
  *o = {d.max_m, d.max_k, kDefaultTaus, 3, d.trials, d.iters, d.seed, DNMS_LOG_DOMAIN_AUTO,
        d.fw_trials};
}

void dnms_bench_options_init(dnms_bench_options* o) {
  if (o == nullptr) return;
  const dnms::harness::BenchOptions d;
  o->m = d.m;
  o->k = d.k;
  o->iters = d.iters;
  o->repetitions = d.repetitions;
  o->seed = d.seed;
  dnms_pipeline_options_init(&o->pipeline);
}

dnms_status dnms_proposals_read(const char* path, dnms_proposal_set** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    auto set = dnms::io::parse_proposals(dnms::io::read_file(path));
    *out = new dnms_proposal_set{std::move(set)};
    return DNMS_OK;
  });
}

dnms_status dnms_proposals_write(const dnms_proposal_set* set, const char* path) {
  if (set == nullptr) return null_arg("set");
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    dnms::io::write_file(path, dnms::io::format_proposals(set->value));
    return DNMS_OK;
  });
}

size_t dnms_proposals_count(const dnms_proposal_set* set) {
  return set == nullptr ? 0 : set->value.size();
}

dnms_status dnms_proposals_get(const dnms_proposal_set* set, size_t index, int64_t* id,
                               double* score, dnms_box* box) {
  if (set == nullptr) return null_arg("set");
  if (index >= set->value.size()) return fail(DNMS_INVALID_INPUT, "index out of range");
  const dnms::Proposal& p = set->value.proposals[index];
  if (id != nullptr) *id = p.id;
  if (score != nullptr) *score = p.score;
  if (box != nullptr) *box = {p.box.x1, p.box.y1, p.box.x2, p.box.y2};
  return DNMS_OK;
}

void dnms_proposals_free(dnms_proposal_set* set) { delete set; }

dnms_status dnms_ground_truth_read(const char* path, dnms_ground_truth** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    auto gt = dnms::io::parse_ground_truth(dnms::io::read_file(path));
    *out = new dnms_ground_truth{std::move(gt)};
    return DNMS_OK;
  });
}

dnms_status dnms_ground_truth_write(const dnms_ground_truth* gt, const char* path) {
  if (gt == nullptr) return null_arg("gt");
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    dnms::io::write_file(path, dnms::io::format_ground_truth(gt->value));
    return DNMS_OK;
  });
}

size_t dnms_ground_truth_count(const dnms_ground_truth* gt) {
  return gt == nullptr ? 0 : gt->value.boxes.size();
}

void dnms_ground_truth_free(dnms_ground_truth* gt) { delete gt; }

dnms_status dnms_synth(const dnms_synth_options* o, dnms_proposal_set** set,
                       dnms_ground_truth** gt) {
  if (o == nullptr) return null_arg("opts");
  if (set == nullptr || gt == nullptr) return null_arg("out");
  return guarded([&] {
    dnms::SynthConfig cfg;
    cfg.num_regions = o->regions;
    cfg.proposals_per_region = o->per_region;
    cfg.jitter = o->jitter;
    cfg.score_noise = o->score_noise;
    cfg.feature_dim = o->feature_dim;
    cfg.image_width = o->image_width;
    cfg.image_height = o->image_height;
    cfg.seed = o->seed;
    auto [s, g] = dnms::synth_generate(cfg);
    *set = new dnms_proposal_set{std::move(s)};
    *gt = new dnms_ground_truth{std::move(g)};
    return DNMS_OK;
  });
}

dnms_status dnms_greedy_nms(const dnms_proposal_set* set, double iou_thresh,
                            dnms_proposal_set** out) {
  if (set == nullptr) return null_arg("set");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new dnms_proposal_set{dnms::greedy_nms(set->value, iou_thresh)};
    return DNMS_OK;
  });
}

dnms_status dnms_soft_nms(const dnms_proposal_set* set, double sigma, double score_floor,
                          dnms_proposal_set** out) {
  if (set == nullptr) return null_arg("set");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new dnms_proposal_set{dnms::soft_nms(set->value, sigma, score_floor)};
    return DNMS_OK;
  });
}

dnms_status dnms_run(const dnms_proposal_set* set, const dnms_ground_truth* gt,
                     const dnms_pipeline_options* opts, dnms_result** out) {
  if (set == nullptr) return null_arg("set");
  if (opts == nullptr) return null_arg("opts");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const dnms::PipelineConfig cfg = to_config(*opts);
    const auto t0 = std::chrono::steady_clock::now();
    dnms::DnmsResult r = dnms::dnms(set->value, gt != nullptr ? &gt->value : nullptr, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    auto* res = new dnms_result;
    res->report.config = cfg;
    res->report.diagnostics = std::move(r.diagnostics);
    res->report.refined = std::move(r.refined);
    res->report.total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    *out = res;
    return DNMS_OK;
  });
}

size_t dnms_result_count(const dnms_result* result) {
  return result == nullptr ? 0 : result->report.refined.size();
}

dnms_status dnms_result_get(const dnms_result* result, size_t k, dnms_box* box, double* score,
                            double* probability) {
  if (result == nullptr) return null_arg("result");
  if (k >= result->report.refined.size()) return fail(DNMS_INVALID_INPUT, "index out of range");
  const dnms::RefinedProposal& r = result->report.refined[k];
  if (box != nullptr) *box = {r.box.x1, r.box.y1, r.box.x2, r.box.y2};
  if (score != nullptr) *score = r.score;
  if (probability != nullptr) *probability = r.probability;
  return DNMS_OK;
}

double dnms_result_kappa(const dnms_result* result) {
  return result == nullptr ? 0.0 : result->report.diagnostics.kappa;
}

double dnms_result_rho(const dnms_result* result) {
  return result == nullptr ? 0.0 : result->report.diagnostics.rho;
}

dnms_status dnms_result_write(const dnms_result* result, const char* path, int include_timings) {
  if (result == nullptr) return null_arg("result");
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    dnms::io::RunReport report = result->report;
    if (include_timings == 0) report.total_ms.reset();
    dnms::io::write_file(path, dnms::io::format_report(report));
    return DNMS_OK;
  });
}

void dnms_result_free(dnms_result* result) { delete result; }

dnms_status dnms_gradcheck(const dnms_gradcheck_options* o, dnms_report** out) {
  if (o == nullptr) return null_arg("opts");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    dnms::harness::GradcheckOptions opt;
    opt.m = o->m;
    opt.k = o->k;
    opt.tau = o->tau;
    opt.iters = o->iters;
    opt.seed = o->seed;
    opt.fd_step = o->fd_step;
    opt.instances = o->instances;
    opt.lambda_kl = o->lambda_kl;
    opt.domain = to_domain(o->log_domain);
    const auto rep = dnms::harness::run_gradcheck(opt);
    *out = new dnms_report{rep.json, rep.pass};
    if (!rep.pass) return fail(DNMS_CHECK_FAILED, "gradient check exceeded its threshold");
    return DNMS_OK;
  });
}

dnms_status dnms_convergence(const dnms_convergence_options* o, dnms_report** out) {
  if (o == nullptr) return null_arg("opts");
  if (out == nullptr) return null_arg("out");
  if (o->taus == nullptr && o->num_taus > 0) return null_arg("taus");
  return guarded([&] {
    dnms::harness::ConvergenceOptions opt;
    opt.max_m = o->max_m;
    opt.max_k = o->max_k;
    opt.taus.assign(o->taus, o->taus + o->num_taus);
    opt.trials = o->trials;
    opt.iters = o->iters;
    opt.seed = o->seed;
    opt.domain = to_domain(o->log_domain);
    opt.fw_trials = o->fw_trials;
    const auto rep = dnms::harness::run_convergence(opt);
    *out = new dnms_report{rep.json, rep.pass};
    if (!rep.pass) return fail(DNMS_CHECK_FAILED, "convergence check failed");
    return DNMS_OK;
  });
}

dnms_status dnms_bench(const dnms_bench_options* o, dnms_report** out) {
  if (o == nullptr) return null_arg("opts");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    dnms::harness::BenchOptions opt;
    opt.m = o->m;
    opt.k = o->k;
    opt.iters = o->iters;
    opt.repetitions = o->repetitions;
    opt.seed = o->seed;
    opt.pipeline = to_config(o->pipeline);
    const auto rep = dnms::harness::run_bench(opt);
    *out = new dnms_report{rep.json, true};
    return DNMS_OK;
  });
}

const char* dnms_report_json(const dnms_report* report) {
  return report == nullptr ? "" : report->json.c_str();
}

int dnms_report_passed(const dnms_report* report) {
  return report != nullptr && report->passed ? 1 : 0;
}

void dnms_report_free(dnms_report* report) { delete report; }

}  // extern "C"
