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

// Directory-driven evaluation runs.
//
// Dataset layout:
//
//   root/<category>/scores/<id>.npy   2-D float32 score map
//   root/<category>/masks/<id>.png    ground truth, nonzero = anomalous;
//                                     may be absent for normal images
//   root/<category>/labels.csv        image_id,label
//   root/<category>/image_scores.csv  image_id,score (only for
//                                     ImageScore::kCsv)

#ifndef STREAMEVAL_HARNESS_HPP_
#define STREAMEVAL_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "streameval/aggregate.hpp"
#include "streameval/hist_core.hpp"
#include "streameval/io.hpp"
#include "streameval/region_pro.hpp"

namespace streameval {

struct DatasetEntry {
  std::string category;
  std::string image_id;
  std::filesystem::path score_path;
  std::optional<std::filesystem::path> mask_path;
  int label = 0;
};

// Lists every image under root, ordered by (category, image id). An empty
// filter keeps all categories. With validate_shapes, each score map header is
// checked against its mask header; a run skips that so every file is opened
// only once. Throws IoError when root is missing or a file is unreadable and
// ValidationError for a labelled-anomalous image without a mask, an image
// missing from labels.csv, or mismatched shapes.
std::vector<DatasetEntry> scan_dataset(
    const std::filesystem::path& root,
    const std::vector<std::string>& categories = {},
    bool validate_shapes = true, OpenCounter* counter = nullptr);

enum class EvalMode { kStreaming, kExact, kDifferential };
enum class ImageScore { kMax, kMean, kCsv };

EvalMode parse_eval_mode(std::string_view name);
ImageScore parse_image_score(std::string_view name);

// What a streaming worker holds after finishing an image.
struct AccumulatorAudit {
  std::string category;
  std::size_t images_done = 0;
  std::size_t region_count = 0;
  // Histogram counters live in the worker's accumulators.
  std::size_t counters = 0;
  // Bytes of decoded image data held at once (score map plus mask).
  std::size_t image_buffer_bytes = 0;
};

struct RunConfig {
  std::filesystem::path root;
  std::vector<std::string> categories;
  std::size_t bins = kDefaultBins;
  // nullopt selects the two-pass auto range (per category min/max).
  std::optional<std::pair<double, double>> range = std::pair{0.0, 1.0};
  double fpr_limit = kDefaultFprLimit;
  int connectivity = kDefaultConnectivity;
  EvalMode mode = EvalMode::kStreaming;
  unsigned workers = 1;
  ImageScore image_score = ImageScore::kMax;
  ReportFormat format = ReportFormat::kCsv;
  std::filesystem::path out;
  // Pixel batches of this many rows per accumulate() call; 0 = whole image.
  std::size_t batch_rows = 0;

  OpenCounter* open_counter = nullptr;
  std::function<void(const AccumulatorAudit&)> audit;
};

// Throws UsageError unless bins >= 2, fpr_limit in (0,1], workers >= 1 and
// connectivity is 4 or 8.
void validate(const RunConfig& config);

struct CategoryFailure {
  std::string category;
  std::string message;
};

// One metric whose streaming and exact values were compared.
struct MetricDelta {
  std::string category;
  std::string metric;
  double streaming = 0.0;
  double exact = 0.0;
  double delta() const { return streaming > exact ? streaming - exact
                                                  : exact - streaming; }
};

struct RunResult {
  // Streaming values in streaming and differential mode, exact values in
  // exact mode. Failed categories are left out.
  SuiteReport report;
  std::vector<CategoryFailure> failures;
  std::vector<MetricDelta> deltas;
  double tolerance = 0.0;
  std::uint64_t clamped = 0;

  bool differential_ok() const;
  bool ok() const { return failures.empty() && differential_ok(); }
};

// Evaluates every category under config.root. Throws for configuration
// errors, a missing root or an unknown category filter; any error inside a
// category (bad file, missing mask, undefined metric) is collected in
// RunResult::failures and that category is skipped. A root without
// categories throws ValidationError.
RunResult run_eval(const RunConfig& config);

// Reads the number of workers from STREAMEVAL_WORKERS, or 1.
unsigned default_workers();

}  // namespace streameval

#endif  // STREAMEVAL_HARNESS_HPP_
