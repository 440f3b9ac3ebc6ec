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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "dnms_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::string& args) {
  fs::create_directories(kDir);
  const fs::path out = kDir / "stdout.txt", err = kDir / "stderr.txt";
  const std::string cmd = std::string("\"") + DNMS_CLI + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return std::string(DNMS_TEST_DATA) + "/" + name; }

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("run") {
  const fs::path out = kDir / "run.jsonl";
  auto r = cli("run " + data("fixture.jsonl") + " --k 2 --output " + out.string());
  CHECK(r.code == 0);
  CHECK(lines(slurp(out)) == 3);  // header + K records

  r = cli("run " + data("fixture.jsonl") + " --gt " + data("fixture.gt.jsonl") + " --output " + out.string());
  CHECK(r.code == 0);

  r = cli("run " + data("malformed.jsonl") + " --output " + out.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);

  r = cli("run " + data("fixture.jsonl") + " --tau 0 --output " + out.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("tau must be positive") != std::string::npos);

  r = cli("run " + data("fixture.jsonl") + " --tau 1e-5 --log-domain off --output " + out.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("log_domain") != std::string::npos);

  r = cli("run " + data("fixture.jsonl") + " --k banana --output " + out.string());
  CHECK(r.code == 2);
  r = cli("run " + data("fixture.jsonl") + " --log-domain maybe --output " + out.string());
  CHECK(r.code == 2);
}

TEST_CASE("run entropy unit") {
  const fs::path nats = kDir / "nats.jsonl", bits = kDir / "bits.jsonl";
  REQUIRE(cli("run " + data("fixture.jsonl") + " --k 2 --entropy-threshold 0.5 --output " + nats.string()).code == 0);
  REQUIRE(cli("run " + data("fixture.jsonl") + " --k 2 --entropy-threshold 0.5 --entropy-unit bits --output " +
              bits.string())
              .code == 0);
  CHECK(slurp(nats).find("\"entropy_threshold_nats\":0.5,") != std::string::npos);
  CHECK(slurp(bits).find("\"entropy_threshold_nats\":0.34657359027997264,") != std::string::npos);
}

TEST_CASE("run timings are opt-in") {
  const fs::path a = kDir / "t1.jsonl", b = kDir / "t2.jsonl";
  REQUIRE(cli("run " + data("fixture.jsonl") + " --output " + a.string()).code == 0);
  REQUIRE(cli("run " + data("fixture.jsonl") + " --timings --output " + b.string()).code == 0);
  CHECK(slurp(a).find("timings") == std::string::npos);
  CHECK(slurp(b).find("\"timings\":{\"total_ms\":") != std::string::npos);
}

TEST_CASE("synth") {
  const fs::path a = kDir / "a.jsonl", b = kDir / "b.jsonl";
  auto r = cli("synth --regions 3 --per-region 5 --seed 7 --output " + a.string());
  CHECK(r.code == 0);
  CHECK(lines(slurp(a)) == 16);
  CHECK(fs::exists(a.string() + ".gt.jsonl"));
  r = cli("synth --regions 3 --per-region 5 --seed 7 --output " + b.string());
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a.string() + ".gt.jsonl") == slurp(b.string() + ".gt.jsonl"));
  CHECK(cli("synth --regions 0 --output " + a.string()).code == 2);
  CHECK(cli("synth --regions x --output " + a.string()).code == 2);
}

TEST_CASE("gradcheck") {
  auto r = cli("gradcheck");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"pass\": true") != std::string::npos);
  r = cli("gradcheck --tau 0.05");
  CHECK(r.out.find("\"threshold\": 0.01") != std::string::npos);
  r = cli("gradcheck --fd-step 10");
  CHECK(r.code == 1);
  CHECK(r.out.find("\"note\"") != std::string::npos);
  CHECK(cli("gradcheck --tau 0").code == 2);
}

TEST_CASE("convergence") {
  auto r = cli("convergence");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"failures\": 0") != std::string::npos);
  CHECK(cli("convergence --trials 0").code == 2);
  CHECK(cli("convergence --tau-grid 0.5,abc").code == 2);
  r = cli("convergence --tau-grid 0.001 --log-domain off");
  CHECK(r.code == 3);
  CHECK(r.err.find("log_domain") != std::string::npos);
}

TEST_CASE("bench") {
  auto r = cli("bench --m 64 --k 4 --repetitions 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"repetitions\": 3") != std::string::npos);
  CHECK(r.out.find("dnms_median") != std::string::npos);
  CHECK(r.out.find("greedy_nms_median") != std::string::npos);
  CHECK(r.out.find("soft_nms_median") != std::string::npos);
  CHECK(cli("bench --m 1 --repetitions 1").code == 0);
  CHECK(cli("bench --m 0").code == 2);
}

TEST_CASE("usage errors") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("run --help").code == 0);
  CHECK(cli("run --help").out.find("stand-in") != std::string::npos);
}
