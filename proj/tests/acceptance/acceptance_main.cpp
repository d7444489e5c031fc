/*
 * Copyright 2026 The StreamEval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance gate: one PASS/FAIL line per criterion, followed by indented
// diagnostics. Exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "streameval/aggregate.hpp"
#include "streameval/curve_metrics.hpp"
#include "streameval/errors.hpp"
#include "streameval/harness.hpp"
#include "streameval/hist_core.hpp"
#include "streameval/io.hpp"
#include "streameval/oracle_exact.hpp"
#include "streameval/region_pro.hpp"
#include "streameval/synthetic.hpp"
#include "support/fixtures.hpp"

namespace streameval {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;
};

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

constexpr std::array<std::pair<const char*, double CategoryReport::*>, 8>
    kMetrics = {{{"img_auroc", &CategoryReport::img_auroc},
                 {"img_ap", &CategoryReport::img_ap},
                 {"img_f1max", &CategoryReport::img_f1max},
                 {"px_auroc", &CategoryReport::px_auroc},
                 {"px_ap", &CategoryReport::px_ap},
                 {"px_f1max", &CategoryReport::px_f1max},
                 {"aupro", &CategoryReport::aupro},
                 {"iou_max", &CategoryReport::iou_max}}};

// The 50-category synthetic set shared by criteria 2, 3 and 5.
SyntheticSpec SuiteSpec() {
  SyntheticSpec spec;
  spec.seed = 0;
  spec.n_categories = 50;
  spec.n_images = 64;
  spec.shape = {64, 64};
  spec.separations = {0.0, 0.3, 0.7, 1.0};
  return spec;
}

void RequireAligned(const SuiteReport& a, const SuiteReport& b) {
  if (a.rows.size() != b.rows.size() || a.rows.empty()) {
    throw Error("streaming and exact reports have different categories");
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].category != b.rows[i].category) {
      throw Error("category order differs at row " + std::to_string(i));
    }
  }
}

RunResult Run(const fs::path& root, std::size_t bins, EvalMode mode,
              unsigned workers = 1, std::size_t batch_rows = 0) {
  RunConfig config;
  config.root = root;
  config.bins = bins;
  config.mode = mode;
  config.workers = workers;
  config.batch_rows = batch_rows;
  RunResult r = run_eval(config);
  if (!r.failures.empty()) {
    throw Error("category " + r.failures[0].category + " failed: " +
                r.failures[0].message);
  }
  return r;
}

Outcome MadReproduction() {
  Outcome o;
  const std::array<double, 7> vitad = {0.983, 0.993, 0.973, 0.976,
                                       0.552, 0.584, 0.920};
  const std::array<double, 7> invad = {0.981, 0.990, 0.976, 0.980,
                                       0.563, 0.592, 0.944};
  const std::string a = format_percent(mad(vitad));
  const std::string b = format_percent(mad(invad));
  o.pass = a == "85.4" && b == "86.1";
  o.summary = "ViTAD " + a + " (want 85.4), InvAD " + b + " (want 86.1)";
  return o;
}

Outcome DifferentialEnvelope(const fs::path& root, const SuiteReport& exact,
                             double exact_seconds) {
  Outcome o;
  const auto start = Clock::now();
  std::vector<std::string> parts;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const double tol = n == 4096 ? 5e-4 : 2.0 / static_cast<double>(n);
    const SuiteReport s = Run(root, n, EvalMode::kStreaming).report;
    RequireAligned(s, exact);
    std::map<std::string, int> violations;
    double worst = 0.0;
    std::string worst_at;
    for (std::size_t c = 0; c < s.rows.size(); ++c) {
      for (const auto& [name, field] : kMetrics) {
        const double d = std::abs(s.rows[c].*field - exact.rows[c].*field);
        if (d > tol) ++violations[name];
        if (d > worst) {
          worst = d;
          worst_at = std::string(name) + " in " + s.rows[c].category;
        }
      }
    }
    int total = 0;
    std::string by_metric;
    for (const auto& [name, k] : violations) {
      total += k;
      by_metric += " " + name + "=" + std::to_string(k);
    }
    if (total > 0) o.pass = false;
    parts.push_back(Fmt("N=%zu:%d", n, total));
    o.details.push_back(
        Fmt("N=%zu tol=%.3g max|delta|=%.3g (%s) violations=%d of %zu",
            n, tol, worst, worst_at.c_str(), total, 8 * s.rows.size()) +
        (total > 0 ? " [" + by_metric.substr(1) + "]" : ""));
  }
  const double seconds = exact_seconds + Seconds(start);
  if (seconds >= 120.0) o.pass = false;
  o.summary = "metric violations " + parts[0] + " " + parts[1] + " " +
              parts[2] + Fmt(", %.1f s on one core", seconds);
  return o;
}

Outcome BinConvergence(const fs::path& root, const SuiteReport& exact) {
  Outcome o;
  std::vector<double> medians;
  for (std::size_t n : {64u, 128u, 256u, 512u}) {
    const SuiteReport s = Run(root, n, EvalMode::kStreaming).report;
    RequireAligned(s, exact);
    std::vector<double> err;
    for (std::size_t c = 0; c < s.rows.size(); ++c) {
      err.push_back(std::abs(s.rows[c].px_auroc - exact.rows[c].px_auroc));
    }
    std::sort(err.begin(), err.end());
    const std::size_t m = err.size() / 2;
    medians.push_back(err.size() % 2 ? err[m] : 0.5 * (err[m - 1] + err[m]));
    o.details.push_back(Fmt("N=%zu median |px_auroc error|=%.3g", n,
                            medians.back()));
  }
  std::string ratios;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    const double r = medians[i] / medians[i - 1];
    if (!(r >= 0.4 && r <= 0.6)) o.pass = false;
    ratios += Fmt(" %.3f", r);
  }
  o.summary = "median ratio per doubling" + ratios + " (want 0.4..0.6)";
  return o;
}

Outcome Speedup() {
  Outcome o;
  constexpr std::size_t kSamples = 10'000'000;
  SplitMix64 rng(4);
  std::vector<float> scores(kSamples);
  std::vector<std::uint8_t> labels(kSamples);
  for (std::size_t i = 0; i < kSamples; ++i) {
    labels[i] = rng.uniform() < 0.1 ? 1 : 0;
    const double v = (labels[i] ? 0.65 : 0.4) + 0.15 * rng.normal();
    scores[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }

  auto start = Clock::now();
  ScoreHistogramPair pair{BinSpec()};
  pair.accumulate(SampleBatch{scores, labels});
  const std::array<double, 4> streaming = {
      auroc(pair), average_precision(pair), f1_max(pair).value,
      iou_max(pair).value};
  const double t_stream = Seconds(start);
  const std::size_t sketch_bytes =
      serialize(pair.pos()).size() + serialize(pair.neg()).size();

  start = Clock::now();
  RawSampleStore store;
  store.append(scores, labels);
  const std::array<double, 4> exact = {
      exact_auroc(store), exact_ap(store), exact_f1_max(store).value,
      exact_iou_max(store).value};
  const double t_exact = Seconds(start);
  const std::size_t raw_bytes = store.bytes();

  double gap = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    gap = std::max(gap, std::abs(streaming[i] - exact[i]));
  }
  const double speedup = t_exact / t_stream;
  o.pass = speedup >= 5.0 && sketch_bytes < 1'000'000 &&
           raw_bytes > 80'000'000;
  o.summary = Fmt("%.1fx faster (%.3f s vs %.3f s), sketch %zu B vs raw "
                  "%zu B",
                  speedup, t_stream, t_exact, sketch_bytes, raw_bytes);
  o.details.push_back(Fmt("10^7 samples, max |streaming - exact| over four "
                          "metrics %.3g",
                          gap));
  return o;
}

Outcome WorkerInvariance(const std::vector<fs::path>& roots) {
  Outcome o;
  std::size_t runs = 0;
  for (const fs::path& root : roots) {
    const SuiteReport ref = Run(root, kDefaultBins, EvalMode::kStreaming).report;
    std::array<std::string, 3> want;
    const std::array<ReportFormat, 3> formats = {
        ReportFormat::kCsv, ReportFormat::kMarkdown, ReportFormat::kJson};
    for (std::size_t f = 0; f < 3; ++f) want[f] = render(ref, formats[f]);
    for (unsigned workers : {1u, 2u, 8u}) {
      for (std::size_t batch_rows : {0u, 1u, 7u}) {
        const SuiteReport r = Run(root, kDefaultBins, EvalMode::kStreaming,
                                  workers, batch_rows)
                                  .report;
        ++runs;
        for (std::size_t f = 0; f < 3; ++f) {
          if (render(r, formats[f]) != want[f]) {
            o.pass = false;
            o.details.push_back(Fmt("%s: workers=%u batch_rows=%zu differs",
                                    root.filename().c_str(), workers,
                                    batch_rows));
          }
        }
      }
    }
  }
  o.summary = Fmt("%zu runs over %zu datasets x 3 formats %s", runs,
                  roots.size(), o.pass ? "byte-identical" : "differ");
  return o;
}

struct ProFixture {
  ScoreMap scores;
  Mask mask;
};

// Image 1 of generate_category(6, i, 2, 8x8) with separations cycling
// {0, 0.3, 0.7, 1.0}, keeping masks with at least two regions.
std::vector<ProFixture> ProFixtures(std::size_t count) {
  std::vector<ProFixture> out;
  const std::array<double, 4> separations = {0.0, 0.3, 0.7, 1.0};
  for (std::size_t i = 0; out.size() < count; ++i) {
    AnomalyProfile profile;
    profile.separation = separations[i % separations.size()];
    auto images = generate_category(6, i, 2, {8, 8}, profile);
    SyntheticImage& img = images[1];
    if (label_components(img.mask).region_count() < 2) continue;
    out.push_back({std::move(img.scores), std::move(img.mask)});
  }
  return out;
}

Outcome AuproCorrectness() {
  Outcome o;
  constexpr double kLimit = 0.3;
  const BinSpec spec;
  const double tol = 2.0 / static_cast<double>(spec.n_bins());
  const std::vector<ProFixture> fixtures = ProFixtures(100);
  int violations = 0;
  int mixed = 0;
  double worst = 0.0;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const ProFixture& fx = fixtures[f];
    RegionAccumulator acc(spec);
    acc.accumulate(fx.scores, label_components(fx.mask));
    const double s = aupro(acc, kLimit);
    const double x = pro_exact(std::span(&fx.scores, 1), std::span(&fx.mask, 1),
                               kLimit);
    const double d = std::abs(s - x);
    worst = std::max(worst, d);
    if (d <= tol) continue;
    ++violations;
    // Does some bin hold both a foreground and a background pixel?
    std::vector<int> kind(spec.n_bins(), 0);
    for (std::size_t p = 0; p < fx.mask.size(); ++p) {
      kind[bin_index(spec, fx.scores.data()[p])] |= fx.mask.data()[p] ? 1 : 2;
    }
    const bool shared =
        std::find(kind.begin(), kind.end(), 3) != kind.end();
    if (shared) ++mixed;
    o.details.push_back(Fmt("fixture %zu: aupro=%.6f exact=%.6f |delta|=%.3g%s",
                            f, s, x, d,
                            shared ? " (a bin holds foreground and background)"
                                   : ""));
  }

  // The same masks with strictly separated scores.
  SplitMix64 rng(66);
  int perfect_ok = 0;
  for (const ProFixture& fx : fixtures) {
    ScoreMap scores(fx.mask.shape(), 0.0f);
    for (std::size_t p = 0; p < fx.mask.size(); ++p) {
      scores.data()[p] = static_cast<float>(
          fx.mask.data()[p] ? rng.uniform(0.6, 1.0) : rng.uniform(0.0, 0.4));
    }
    RegionAccumulator acc(spec);
    acc.accumulate(scores, label_components(fx.mask));
    if (aupro(acc, kLimit) == 1.0 &&
        pro_exact(std::span(&scores, 1), std::span(&fx.mask, 1), kLimit) ==
            1.0) {
      ++perfect_ok;
    }
  }
  o.pass = violations == 0 && perfect_ok == static_cast<int>(fixtures.size());
  o.summary = Fmt("%d of %zu fixtures outside 2/N (max |delta| %.3g, %d with "
                  "a shared bin); perfect predictions exactly 1.0: %d of %zu",
                  violations, fixtures.size(), worst, mixed, perfect_ok,
                  fixtures.size());
  return o;
}

Outcome ExhaustiveOracles() {
  Outcome o;
  constexpr std::array<double, 3> kAlphabet = {0.0, 0.5, 1.0};
  std::size_t multisets = 0, auroc_checked = 0, cut_checked = 0;
  int mismatches = 0;
  auto note = [&](const std::string& s) {
    ++mismatches;
    if (o.details.size() < 10) o.details.push_back(s);
  };

  // Element type t is (score kAlphabet[t / 2], label t % 2); a multiset is a
  // nondecreasing sequence of types.
  std::vector<int> seq;
  std::function<void(int)> visit = [&](int min_type) {
    if (!seq.empty()) {
      ++multisets;
      RawSampleStore store;
      std::vector<double> sc;
      std::vector<int> lb;
      for (int t : seq) {
        sc.push_back(kAlphabet[t / 2]);
        lb.push_back(t % 2);
        store.append(sc.back(), static_cast<std::uint8_t>(lb.back()));
      }
      const std::uint64_t pos = store.positives(), neg = store.negatives();
      std::string name;
      for (std::size_t i = 0; i < sc.size(); ++i) {
        name += Fmt("(%.1f,%d)", sc[i], lb[i]);
      }

      if (pos > 0 && neg > 0) {
        ++auroc_checked;
        std::uint64_t twice = 0;
        for (std::size_t i = 0; i < sc.size(); ++i) {
          for (std::size_t j = 0; j < sc.size(); ++j) {
            if (lb[i] != 1 || lb[j] != 0) continue;
            twice += sc[i] > sc[j] ? 2 : sc[i] == sc[j] ? 1 : 0;
          }
        }
        const double want = static_cast<double>(twice) /
                            static_cast<double>(2 * pos * neg);
        if (exact_auroc(store) != want) note("auroc " + name);
      } else {
        try {
          exact_auroc(store);
          note("auroc accepted single class " + name);
        } catch (const UndefinedMetricError&) {
        }
      }

      if (pos > 0) {
        ++cut_checked;
        // Every threshold t predicts score >= t; descending, strict '>' on
        // exact rationals keeps the largest threshold among ties.
        std::uint64_t f1_num = 0, f1_den = 1, iou_num = 0, iou_den = 1;
        double f1_thr = 0.0, iou_thr = 0.0;
        bool first = true;
        for (auto it = kAlphabet.rbegin(); it != kAlphabet.rend(); ++it) {
          if (std::find(sc.begin(), sc.end(), *it) == sc.end()) continue;
          std::uint64_t tp = 0, fp = 0;
          for (std::size_t i = 0; i < sc.size(); ++i) {
            if (sc[i] >= *it) (lb[i] ? tp : fp) += 1;
          }
          const std::uint64_t fn = pos - tp;
          const std::uint64_t fn_ = 2 * tp, fd = 2 * tp + fp + fn;
          const std::uint64_t in = tp, id = tp + fp + fn;
          if (first || fn_ * f1_den > f1_num * fd) {
            f1_num = fn_, f1_den = fd, f1_thr = *it;
          }
          if (first || in * iou_den > iou_num * id) {
            iou_num = in, iou_den = id, iou_thr = *it;
          }
          first = false;
        }
        const ExactThresholded f1 = exact_f1_max(store);
        const ExactThresholded iou = exact_iou_max(store);
        if (f1.value != static_cast<double>(f1_num) / f1_den ||
            f1.thr != f1_thr) {
          note("f1 " + name);
        }
        if (iou.value != static_cast<double>(iou_num) / iou_den ||
            iou.thr != iou_thr) {
          note("iou " + name);
        }
      }
    }
    if (seq.size() == 6) return;
    for (int t = min_type; t < 6; ++t) {
      seq.push_back(t);
      visit(t);
      seq.pop_back();
    }
  };
  visit(0);
  o.pass = mismatches == 0;
  o.summary = Fmt("%zu multisets: %zu AUROC and %zu F1/IoU cases, %d "
                  "mismatches",
                  multisets, auroc_checked, cut_checked, mismatches);
  return o;
}

Outcome PropertySuites(const fs::path& scratch) {
  Outcome o;
  const fs::path json = scratch / "property.json";
  const fs::path log = scratch / "property.log";
  const std::string cmd = std::string("'") + STREAMEVAL_PROPERTY_TESTS_PATH +
                          "' --gtest_output=json:'" + json.string() +
                          "' >'" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!fs::exists(json)) {
    o.pass = false;
    o.summary = Fmt("property binary wrote no report (exit %d)", code);
    return o;
  }
  const nlohmann::json report = nlohmann::json::parse(read_text_file(json));
  const std::set<std::string> required = {
      "HistCoreProperty",     "CurveMetricsProperty", "RegionProProperty",
      "OracleExactProperty",  "AggregateProperty",    "HarnessProperty"};
  std::set<std::string> seen;
  int tests = 0, failed = 0, short_runs = 0;
  for (const auto& suite : report.at("testsuites")) {
    seen.insert(suite.at("name").get<std::string>());
    for (const auto& t : suite.at("testsuite")) {
      ++tests;
      const std::string name = suite.at("name").get<std::string>() + "." +
                               t.at("name").get<std::string>();
      long cases = 0;
      if (t.contains("cases")) {
        const auto& v = t.at("cases");
        cases = v.is_string() ? std::stol(v.get<std::string>())
                              : v.get<long>();
      }
      if (cases < 1000) {
        ++short_runs;
        o.details.push_back(Fmt("%s ran %ld cases", name.c_str(), cases));
      }
      if (t.contains("failures")) {
        ++failed;
        if (t.contains("failed_cases")) {
          const auto& v = t.at("failed_cases");
          o.details.push_back(
              name + ": " +
              (v.is_string() ? v.get<std::string>()
                             : std::to_string(v.get<long>())) +
              " of " + std::to_string(cases) + " cases failed");
        }
        std::string msg = t.at("failures")[0].at("failure").get<std::string>();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        if (msg.size() > 240) msg = msg.substr(0, 240) + "...";
        o.details.push_back(name + " failed: " + msg);
      }
    }
  }
  for (const std::string& s : required) {
    if (!seen.count(s)) {
      o.pass = false;
      o.details.push_back("missing suite " + s);
    }
  }
  o.pass = o.pass && code == 0 && failed == 0 && short_runs == 0;
  o.summary = Fmt("%d properties in %zu suites, %d failed, %d under 1000 "
                  "cases",
                  tests, seen.size(), failed, short_runs);
  return o;
}

int Main() {
  testing::TempDir scratch;
  const fs::path suite_root = scratch / "suite";
  const fs::path small_root = scratch / "small";
  gen_synthetic(suite_root, SuiteSpec());
  SyntheticSpec small;
  small.seed = 1;
  small.n_categories = 6;
  small.n_images = 16;
  small.shape = {32, 32};
  small.separations = {0.2, 0.5, 0.8};
  gen_synthetic(small_root, small);

  bool all = true;
  auto report = [&](int id, const char* title, const Outcome& o) {
    all = all && o.pass;
    std::printf("criterion %d %s: %s: %s\n", id, o.pass ? "PASS" : "FAIL",
                title, o.summary.c_str());
    for (const std::string& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  };
  auto guarded = [&](int id, const char* title, auto fn) {
    try {
      report(id, title, fn());
    } catch (const std::exception& e) {
      Outcome o;
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
      report(id, title, o);
    }
  };

  guarded(1, "mAD reproduction", MadReproduction);

  const auto start = Clock::now();
  SuiteReport exact;
  double exact_seconds = 0.0;
  try {
    exact = Run(suite_root, kDefaultBins, EvalMode::kExact).report;
    exact_seconds = Seconds(start);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "exact run failed: %s\n", e.what());
  }
  guarded(2, "differential envelope",
          [&] { return DifferentialEnvelope(suite_root, exact, exact_seconds); });
  guarded(3, "bin convergence",
          [&] { return BinConvergence(suite_root, exact); });
  guarded(4, "speed and memory at 10^7 samples", Speedup);
  guarded(5, "partition and worker invariance",
          [&] { return WorkerInvariance({suite_root, small_root}); });
  guarded(6, "AU-PRO correctness", AuproCorrectness);
  guarded(7, "exhaustive small-instance oracles", ExhaustiveOracles);
  guarded(8, "invariant property suites",
          [&] { return PropertySuites(scratch.path()); });
  return all ? 0 : 1;
}

}  // namespace
}  // namespace streameval

int main() { return streameval::Main(); }
