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

// streameval: evaluate anomaly-detection score maps from a dataset tree.
//
//   streameval eval --root DIR [--bins N] [--range lo,hi|auto] ...
//   streameval diff --root DIR ...      (streaming vs exact)
//   streameval gen  --out DIR --seed S --categories C --images I ...
//
// Exit codes: 0 clean run, 1 validation or metric errors, 2 usage errors.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streameval/aggregate.hpp"
#include "streameval/errors.hpp"
#include "streameval/harness.hpp"
#include "streameval/io.hpp"
#include "streameval/synthetic.hpp"

namespace {

using streameval::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> SplitComma(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double ParseNumber(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw streameval::UsageError(flag + ": not a number: '" + text + "'");
  }
}

struct EvalFlags {
  std::string root;
  std::string categories;
  std::size_t bins = streameval::kDefaultBins;
  std::string range = "0,1";
  double fpr_limit = streameval::kDefaultFprLimit;
  int connectivity = streameval::kDefaultConnectivity;
  std::string mode = "streaming";
  unsigned workers = 0;
  std::string out;
  std::string format = "csv";
  std::string image_score = "max";
};

void AddEvalFlags(CLI::App* cmd, EvalFlags& f, bool with_mode) {
  cmd->add_option("--root", f.root, "Dataset root directory")->required();
  cmd->add_option("--categories", f.categories,
                  "Comma-separated category filter");
  cmd->add_option("--bins", f.bins, "Histogram bins")->capture_default_str();
  cmd->add_option("--range", f.range, "Score range 'lo,hi' or 'auto'")
      ->capture_default_str();
  cmd->add_option("--fpr-limit", f.fpr_limit, "AU-PRO integration limit")
      ->capture_default_str();
  cmd->add_option("--connectivity", f.connectivity, "4 or 8")
      ->capture_default_str();
  if (with_mode) {
    cmd->add_option("--mode", f.mode, "streaming, exact or differential")
        ->capture_default_str();
  }
  cmd->add_option("--workers", f.workers,
                  "Worker threads (default: $STREAMEVAL_WORKERS or 1)");
  cmd->add_option("--out", f.out, "Report path (default: stdout)");
  cmd->add_option("--format", f.format, "csv, markdown or json")
      ->capture_default_str();
  cmd->add_option("--image-score", f.image_score, "max, mean or csv")
      ->capture_default_str();
}

RunConfig ToConfig(const EvalFlags& f) {
  RunConfig config;
  config.root = f.root;
  if (!f.categories.empty()) config.categories = SplitComma(f.categories);
  config.bins = f.bins;
  if (f.range == "auto") {
    config.range.reset();
  } else {
    const auto parts = SplitComma(f.range);
    if (parts.size() != 2) {
      throw streameval::UsageError("--range expects 'lo,hi' or 'auto'");
    }
    config.range = std::pair{ParseNumber(parts[0], "--range"),
                             ParseNumber(parts[1], "--range")};
  }
  config.fpr_limit = f.fpr_limit;
  config.connectivity = f.connectivity;
  config.mode = streameval::parse_eval_mode(f.mode);
  config.workers = f.workers != 0 ? f.workers : streameval::default_workers();
  config.format = streameval::parse_report_format(f.format);
  config.out = f.out;
  config.image_score = streameval::parse_image_score(f.image_score);
  streameval::validate(config);
  return config;
}

int RunEval(const RunConfig& config) {
  const streameval::RunResult result = streameval::run_eval(config);
  for (const auto& failure : result.failures) {
    std::cerr << "error: category " << failure.category << ": "
              << failure.message << "\n";
  }
  if (result.clamped > 0) {
    std::cerr << "note: " << result.clamped
              << " samples fell outside the score range and were clamped\n";
  }
  for (const auto& d : result.deltas) {
    if (d.delta() > result.tolerance) {
      std::fprintf(stderr,
                   "diff: %s %s streaming=%.6f exact=%.6f |delta|=%.3g > %.3g\n",
                   d.category.c_str(), d.metric.c_str(), d.streaming, d.exact,
                   d.delta(), result.tolerance);
    }
  }
  if (!result.report.rows.empty()) {
    const std::string text = streameval::render(result.report, config.format);
    if (config.out.empty()) {
      std::cout << text;
    } else {
      streameval::write_text_file(config.out, text);
    }
  }
  return result.ok() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming anomaly-detection evaluation"};
  app.require_subcommand(1);

  EvalFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a dataset tree");
  AddEvalFlags(eval, eval_flags, true);

  EvalFlags diff_flags;
  CLI::App* diff = app.add_subcommand(
      "diff", "Run streaming and exact evaluation and compare them");
  AddEvalFlags(diff, diff_flags, false);

  streameval::SyntheticSpec gen_spec;
  std::string gen_out;
  std::string gen_shape = "64x64";
  std::string gen_separation = "0.7";
  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic dataset tree");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_spec.seed, "RNG seed")->capture_default_str();
  gen->add_option("--categories", gen_spec.n_categories, "Category count")
      ->capture_default_str();
  gen->add_option("--images", gen_spec.n_images, "Images per category")
      ->capture_default_str();
  gen->add_option("--shape", gen_shape, "ROWSxCOLS")->capture_default_str();
  gen->add_option("--separation", gen_separation,
                  "Comma-separated separations, cycled over categories")
      ->capture_default_str();
  gen->add_option("--anomaly-fraction", gen_spec.profile.anomaly_fraction,
                  "Share of anomalous images")
      ->capture_default_str();
  gen->add_flag("--force", gen_spec.force, "Replace a non-empty --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eval) return RunEval(ToConfig(eval_flags));
    if (*diff) {
      diff_flags.mode = "differential";
      return RunEval(ToConfig(diff_flags));
    }
    if (*gen) {
      const auto x = gen_shape.find('x');
      if (x == std::string::npos) {
        throw streameval::UsageError("--shape expects ROWSxCOLS");
      }
      gen_spec.shape = {
          static_cast<std::size_t>(ParseNumber(gen_shape.substr(0, x),
                                               "--shape")),
          static_cast<std::size_t>(ParseNumber(gen_shape.substr(x + 1),
                                               "--shape"))};
      gen_spec.separations.clear();
      for (const std::string& s : SplitComma(gen_separation)) {
        gen_spec.separations.push_back(ParseNumber(s, "--separation"));
      }
      streameval::gen_synthetic(gen_out, gen_spec);
      return kExitOk;
    }
  } catch (const streameval::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const streameval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
