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

#include "dnms/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dnms/error.hpp"

namespace dnms::io {
namespace {

using json = nlohmann::ordered_json;

class ParseError : public InvalidInput {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InvalidInput("line " + std::to_string(line) + ": " + what) {}
};

json box_to_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("box must be [x1, y1, x2, y2]");
  return Box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json mask_to_json(const Mask& m) {
  return json{{"width", m.width()},
              {"height", m.height()},
              {"values", std::vector<double>(m.values().begin(), m.values().end())}};
}

Mask mask_from_json(const json& j) {
  return Mask(j.at("width").get<std::size_t>(), j.at("height").get<std::size_t>(),
              j.at("values").get<std::vector<double>>());
}

// Non-empty lines with their 1-based numbers.
std::vector<std::pair<std::size_t, std::string>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++number;
    std::string line(text.substr(pos, end - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.emplace_back(number, line);
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

json parse_line(std::size_t number, const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(number, std::string("malformed JSON: ") + e.what());
  }
}

void expect_header(std::size_t number, const json& h, const char* format) {
  if (!h.is_object() || h.value("format", "") != format) {
    throw ParseError(number, std::string("expected a \"") + format + "\" header");
  }
  if (h.value("version", 0) != kFormatVersion) {
    throw ParseError(number, "unsupported format version");
  }
}

std::string domain_name(DomainMode d) {
  switch (d) {
    case DomainMode::kLog: return "on";
    case DomainMode::kLinear: return "off";
    case DomainMode::kAuto: break;
  }
  return "auto";
}

DomainMode domain_from_name(const std::string& s) {
  if (s == "on") return DomainMode::kLog;
  if (s == "off") return DomainMode::kLinear;
  if (s == "auto") return DomainMode::kAuto;
  throw std::invalid_argument("unknown log_domain mode " + s);
}

json config_to_json(const PipelineConfig& c) {
  json k;
  if (c.k.adaptive) {
    k = json{{"mode", "adaptive"},
             {"iou_thresh", c.k.rule.iou_thresh},
             {"score_floor", c.k.rule.score_floor},
             {"k_max", c.k.rule.k_max}};
  } else {
    k = json{{"mode", "fixed"}, {"k", c.k.fixed_k}};
  }
  return json{{"tau", c.sinkhorn.tau},
              {"iters", c.sinkhorn.iters},
              {"tol", c.sinkhorn.tol},
              {"log_domain", domain_name(c.sinkhorn.domain)},
              {"alpha", c.weights.alpha},
              {"beta", c.weights.beta},
              {"gamma", c.weights.gamma},
              {"entropy_threshold_nats", c.refine.tau_h},
              {"fw_max_iters", c.refine.max_iters},
              {"fw_delta", c.refine.delta},
              {"lambda_min", c.refine.lambda_min},
              {"lambda_max", c.refine.lambda_max},
              {"bisect_eps", c.refine.bisect_eps},
              {"k", k},
              {"seed", c.seed},
              {"kmeans_iters", c.kmeans_iters}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  c.sinkhorn.tau = j.at("tau").get<double>();
  c.sinkhorn.iters = j.at("iters").get<int>();
  c.sinkhorn.tol = j.at("tol").get<double>();
  c.sinkhorn.domain = domain_from_name(j.at("log_domain").get<std::string>());
  c.weights.alpha = j.at("alpha").get<double>();
  c.weights.beta = j.at("beta").get<double>();
  c.weights.gamma = j.at("gamma").get<double>();
  c.refine.tau_h = j.at("entropy_threshold_nats").get<double>();
  c.refine.max_iters = j.at("fw_max_iters").get<int>();
  c.refine.delta = j.at("fw_delta").get<double>();
  c.refine.lambda_min = j.at("lambda_min").get<double>();
  c.refine.lambda_max = j.at("lambda_max").get<double>();
  c.refine.bisect_eps = j.at("bisect_eps").get<double>();
  const json& k = j.at("k");
  c.k.adaptive = k.at("mode").get<std::string>() == "adaptive";
  if (c.k.adaptive) {
    c.k.rule.iou_thresh = k.at("iou_thresh").get<double>();
    c.k.rule.score_floor = k.at("score_floor").get<double>();
    c.k.rule.k_max = k.at("k_max").get<std::size_t>();
  } else {
    c.k.fixed_k = k.at("k").get<std::size_t>();
  }
  c.seed = j.at("seed").get<std::uint64_t>();
  c.kmeans_iters = j.at("kmeans_iters").get<int>();
  return c;
}

json diagnostics_to_json(const Diagnostics& d) {
  return json{{"K", d.K},
              {"kappa", d.kappa},
              {"rho", d.rho},
              {"sinkhorn_iterations", d.sinkhorn_iterations},
              {"log_domain", d.log_domain},
              {"marginal_trace", d.marginal_trace},
              {"fw_iterations", d.fw_iterations},
              {"objective_trace", d.objective_trace},
              {"entropy_threshold_effective", d.entropy_threshold},
              {"fw_fallback_uniform", d.fw_fallback_uniform},
              {"inference_mode", d.inference_mode}};
}

Diagnostics diagnostics_from_json(const json& j) {
  Diagnostics d;
  d.K = j.at("K").get<std::size_t>();
  d.kappa = j.at("kappa").get<double>();
  d.rho = j.at("rho").get<double>();
  d.sinkhorn_iterations = j.at("sinkhorn_iterations").get<int>();
  d.log_domain = j.at("log_domain").get<bool>();
  d.marginal_trace = j.at("marginal_trace").get<std::vector<double>>();
  d.fw_iterations = j.at("fw_iterations").get<int>();
  d.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  d.entropy_threshold = j.at("entropy_threshold_effective").get<double>();
  d.fw_fallback_uniform = j.at("fw_fallback_uniform").get<bool>();
  d.inference_mode = j.at("inference_mode").get<bool>();
  return d;
}

}  // namespace

std::string format_proposals(const ProposalSet& set) {
  std::string out = json{{"format", "dnms-proposals"},
                         {"version", kFormatVersion},
                         {"image_width", set.image_width},
                         {"image_height", set.image_height},
                         {"feature_dim", set.feature_dim}}
                        .dump();
  out += '\n';
  for (const Proposal& p : set.proposals) {
    json rec{{"id", p.id}, {"score", p.score}, {"box", box_to_json(p.box)}, {"feature", p.feature}};
    if (p.mask) rec["mask"] = mask_to_json(*p.mask);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

ProposalSet parse_proposals(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError(1, "empty proposal file");
  ProposalSet set;
  {
    const auto& [number, line] = lines.front();
    const json h = parse_line(number, line);
    expect_header(number, h, "dnms-proposals");
    try {
      set.image_width = h.at("image_width").get<double>();
      set.image_height = h.at("image_height").get<double>();
      set.feature_dim = h.at("feature_dim").get<std::size_t>();
    } catch (const std::exception& e) {
      throw ParseError(number, std::string("bad header: ") + e.what());
    }
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, line] = lines[i];
    const json rec = parse_line(number, line);
    try {
      Proposal p;
      p.id = rec.at("id").get<std::int64_t>();
      p.score = rec.at("score").get<double>();
      p.box = box_from_json(rec.at("box"));
      p.feature = rec.at("feature").get<std::vector<double>>();
      if (rec.contains("mask") && !rec["mask"].is_null()) p.mask = mask_from_json(rec["mask"]);
      set.proposals.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw ParseError(number, std::string("bad proposal record: ") + e.what());
    }
  }
  const auto violations = validate(set);
  if (!violations.empty()) {
    std::string msg = "invalid proposal set:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw InvalidInput(msg);
  }
  return set;
}

std::string format_ground_truth(const GroundTruth& gt) {
  std::string out = json{{"format", "dnms-groundtruth"}, {"version", kFormatVersion}}.dump();
  out += '\n';
  for (std::size_t i = 0; i < gt.boxes.size(); ++i) {
    out += json{{"box", box_to_json(gt.boxes[i])}, {"label", gt.labels.at(i)}}.dump();
    out += '\n';
  }
  return out;
}

GroundTruth parse_ground_truth(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError(1, "empty ground-truth file");
  expect_header(lines.front().first, parse_line(lines.front().first, lines.front().second),
                "dnms-groundtruth");
  GroundTruth gt;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, line] = lines[i];
    const json rec = parse_line(number, line);
    try {
      gt.boxes.push_back(box_from_json(rec.at("box")));
      gt.labels.push_back(rec.value("label", std::int64_t{0}));
    } catch (const std::exception& e) {
      throw ParseError(number, std::string("bad ground-truth record: ") + e.what());
    }
    if (!gt.boxes.back().valid()) throw ParseError(number, "invalid box");
  }
  return gt;
}

std::string format_report(const RunReport& report) {
  json header{{"format", "dnms-report"},
              {"version", kFormatVersion},
              {"config", config_to_json(report.config)},
              {"diagnostics", diagnostics_to_json(report.diagnostics)}};
  if (report.total_ms) header["timings"] = json{{"total_ms", *report.total_ms}};
  std::string out = header.dump();
  out += '\n';
  for (std::size_t k = 0; k < report.refined.size(); ++k) {
    const RefinedProposal& r = report.refined[k];
    json rec{{"k", k},
             {"box", box_to_json(r.box)},
             {"score", r.score},
             {"probability", r.probability},
             {"feature", r.feature},
             {"source_weights", r.source_weights}};
    if (r.mask) rec["mask"] = mask_to_json(*r.mask);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

RunReport parse_report(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError(1, "empty report");
  RunReport report;
  {
    const auto& [number, line] = lines.front();
    const json h = parse_line(number, line);
    expect_header(number, h, "dnms-report");
    try {
      report.config = config_from_json(h.at("config"));
      report.diagnostics = diagnostics_from_json(h.at("diagnostics"));
      if (h.contains("timings")) report.total_ms = h["timings"].at("total_ms").get<double>();
    } catch (const std::exception& e) {
      throw ParseError(number, std::string("bad report header: ") + e.what());
    }
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, line] = lines[i];
    const json rec = parse_line(number, line);
    try {
      RefinedProposal r;
      r.box = box_from_json(rec.at("box"));
      r.score = rec.at("score").get<double>();
      r.probability = rec.at("probability").get<double>();
      r.feature = rec.at("feature").get<std::vector<double>>();
      r.source_weights = rec.at("source_weights").get<std::vector<double>>();
      if (rec.contains("mask")) r.mask = mask_from_json(rec["mask"]);
      report.refined.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(number, std::string("bad refined record: ") + e.what());
    }
  }
  return report;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InvalidInput("failed writing " + path);
}

}  // namespace dnms::io
