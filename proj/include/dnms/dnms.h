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

#ifndef DNMS_DNMS_H_
#define DNMS_DNMS_H_

/*
 * C interface to the differentiable NMS library.
 *
 * Objects are opaque handles created by dnms_* functions and released with
 * the matching *_free function. Every fallible call returns a dnms_status;
 * on failure a message is available from dnms_last_error() on the calling
 * thread until the next failing call on that thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DNMS_API __declspec(dllexport)
#else
#define DNMS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Stable codes; the CLI uses them as process exit codes. */
typedef enum dnms_status {
  DNMS_OK = 0,
  DNMS_CHECK_FAILED = 1,
  DNMS_INVALID_INPUT = 2,
  DNMS_NUMERICAL_FAILURE = 3,
  DNMS_INTERNAL_ERROR = 4
} dnms_status;

typedef enum dnms_log_domain {
  DNMS_LOG_DOMAIN_AUTO = 0,
  DNMS_LOG_DOMAIN_ON = 1,
  DNMS_LOG_DOMAIN_OFF = 2
} dnms_log_domain;

typedef struct dnms_proposal_set dnms_proposal_set;
typedef struct dnms_ground_truth dnms_ground_truth;
typedef struct dnms_result dnms_result;
typedef struct dnms_report dnms_report;

typedef struct dnms_box {
  double x1, y1, x2, y2;
} dnms_box;

typedef struct dnms_pipeline_options {
  double tau;              /* Sinkhorn temperature */
  int iters;               /* Sinkhorn iterations */
  double tol;              /* early-stop marginal violation */
  dnms_log_domain log_domain;
  double alpha, beta, gamma;
  double entropy_threshold; /* nats */
  int fw_max_iters;
  int k;                   /* number of latent regions; 0 = adaptive */
  double adaptive_iou;
  double adaptive_score_floor;
  int adaptive_k_max;
  uint64_t seed;
} dnms_pipeline_options;

typedef struct dnms_synth_options {
  int regions;
  int per_region;
  double jitter;
  double score_noise;
  int feature_dim;
  double image_width, image_height;
  uint64_t seed;
} dnms_synth_options;

typedef struct dnms_gradcheck_options {
  int m, k;
  double tau;
  int iters;
  uint64_t seed;
  double fd_step;
  int instances;
  double lambda_kl;
  dnms_log_domain log_domain;
} dnms_gradcheck_options;

typedef struct dnms_convergence_options {
  int max_m, max_k;
  const double* taus; /* borrowed for the duration of the call */
  size_t num_taus;
  int trials;
  int iters;
  uint64_t seed;
  dnms_log_domain log_domain;
  int fw_trials;
} dnms_convergence_options;

typedef struct dnms_bench_options {
  int m, k;
  int iters;
  int repetitions;
  uint64_t seed;
  dnms_pipeline_options pipeline;
} dnms_bench_options;

DNMS_API const char* dnms_version(void);
DNMS_API const char* dnms_last_error(void);

/* Fill options with the library defaults. */
DNMS_API void dnms_pipeline_options_init(dnms_pipeline_options* opts);
DNMS_API void dnms_synth_options_init(dnms_synth_options* opts);
DNMS_API void dnms_gradcheck_options_init(dnms_gradcheck_options* opts);
DNMS_API void dnms_convergence_options_init(dnms_convergence_options* opts);
DNMS_API void dnms_bench_options_init(dnms_bench_options* opts);

/* Proposal files. Reads validate the set. */
DNMS_API dnms_status dnms_proposals_read(const char* path, dnms_proposal_set** out);
DNMS_API dnms_status dnms_proposals_write(const dnms_proposal_set* set, const char* path);
DNMS_API size_t dnms_proposals_count(const dnms_proposal_set* set);
DNMS_API dnms_status dnms_proposals_get(const dnms_proposal_set* set, size_t index,
                                        int64_t* id, double* score, dnms_box* box);
DNMS_API void dnms_proposals_free(dnms_proposal_set* set);

DNMS_API dnms_status dnms_ground_truth_read(const char* path, dnms_ground_truth** out);
DNMS_API dnms_status dnms_ground_truth_write(const dnms_ground_truth* gt, const char* path);
DNMS_API size_t dnms_ground_truth_count(const dnms_ground_truth* gt);
DNMS_API void dnms_ground_truth_free(dnms_ground_truth* gt);

DNMS_API dnms_status dnms_synth(const dnms_synth_options* opts, dnms_proposal_set** set,
                                dnms_ground_truth** gt);

/* Baselines; the output is a new set. */
DNMS_API dnms_status dnms_greedy_nms(const dnms_proposal_set* set, double iou_thresh,
                                     dnms_proposal_set** out);
DNMS_API dnms_status dnms_soft_nms(const dnms_proposal_set* set, double sigma,
                                   double score_floor, dnms_proposal_set** out);

/* Runs the pipeline. gt may be NULL (inference mode). */
DNMS_API dnms_status dnms_run(const dnms_proposal_set* set, const dnms_ground_truth* gt,
                              const dnms_pipeline_options* opts, dnms_result** out);
DNMS_API size_t dnms_result_count(const dnms_result* result);
DNMS_API dnms_status dnms_result_get(const dnms_result* result, size_t k, dnms_box* box,
                                     double* score, double* probability);
DNMS_API double dnms_result_kappa(const dnms_result* result);
DNMS_API double dnms_result_rho(const dnms_result* result);
/* Writes the run report; the wall-clock section is included only when
 * include_timings is nonzero, keeping default output reproducible. */
DNMS_API dnms_status dnms_result_write(const dnms_result* result, const char* path,
                                       int include_timings);
DNMS_API void dnms_result_free(dnms_result* result);

/* Verification and benchmark drivers. A report is returned whenever the run
 * completed, including DNMS_CHECK_FAILED. */
DNMS_API dnms_status dnms_gradcheck(const dnms_gradcheck_options* opts, dnms_report** out);
DNMS_API dnms_status dnms_convergence(const dnms_convergence_options* opts, dnms_report** out);
DNMS_API dnms_status dnms_bench(const dnms_bench_options* opts, dnms_report** out);
DNMS_API const char* dnms_report_json(const dnms_report* report);
DNMS_API int dnms_report_passed(const dnms_report* report);
DNMS_API void dnms_report_free(dnms_report* report);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* DNMS_DNMS_H_ */
