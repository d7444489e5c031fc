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

#include "streameval/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "streameval/curve_metrics.hpp"
#include "streameval/errors.hpp"
#include "streameval/oracle_exact.hpp"

namespace streameval {

namespace fs = std::filesystem;

namespace {

double ParseDouble(const std::string& text, const std::string& origin) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(origin + ": not a number: '" + text + "'");
  }
  return v;
}

// image_id -> value column of a two-column CSV with an optional header.
std::map<std::string, std::string> ReadKeyedCsv(const fs::path& path,
                                                const std::string& header,
                                                OpenCounter* counter) {
  const auto rows = parse_csv(read_text_file(path, counter));
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && !row.empty() && row[0] == header) continue;
    if (row.size() != 2) {
      throw ValidationError(path.string() + ": row " + std::to_string(i + 1) +
                            " has " + std::to_string(row.size()) +
                            " fields, expected 2");
    }
    if (!out.emplace(row[0], row[1]).second) {
      throw ValidationError(path.string() + ": duplicate image id '" +
                            row[0] + "'");
    }
  }
  return out;
}

bool Contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Category directories (those with a scores/ subdirectory), sorted.
std::vector<std::string> ListCategories(const fs::path& root,
                                        const std::vector<std::string>& filter) {
  if (!fs::is_directory(root)) {
    throw IoError("dataset root is not a directory: " + root.string());
  }
  std::vector<std::string> categories;
  for (const fs::directory_entry& d : fs::directory_iterator(root)) {
    if (!d.is_directory() || !fs::is_directory(d.path() / "scores")) continue;
    const std::string name = d.path().filename().string();
    if (filter.empty() || Contains(filter, name)) categories.push_back(name);
  }
  for (const std::string& wanted : filter) {
    if (!Contains(categories, wanted)) {
      throw ValidationError("category not found under " + root.string() +
                            ": " + wanted);
    }
  }
  std::sort(categories.begin(), categories.end());
  return categories;
}

// Per-worker streaming state for one category.
struct StreamState {
  explicit StreamState(const BinSpec& spec)
      : image(spec), pixel(spec), regions(spec) {}

  ScoreHistogramPair image;
  ScoreHistogramPair pixel;
  RegionAccumulator regions;
  std::size_t images_done = 0;

  std::size_t counters() const {
    return 2 * image.spec().n_bins() + 2 * pixel.spec().n_bins() +
           regions.counter_count();
  }
};

// A decoded image with its ground truth.
struct LoadedImage {
  ScoreMap scores;
  Mask mask;
};

LoadedImage LoadImage(const DatasetEntry& e, OpenCounter* counter) {
  LoadedImage img;
  img.scores = read_npy(e.score_path, counter);
  if (e.mask_path) {
    img.mask = read_png_mask(*e.mask_path, counter);
    if (!(img.mask.shape() == img.scores.shape())) {
      throw ValidationError(
          "shape mismatch for " + e.category + "/" + e.image_id +
          ": score map " + img.scores.shape().ToString() + " vs mask " +
          img.mask.shape().ToString());
    }
  } else {
    img.mask = Mask(img.scores.shape(), 0);
  }
  const bool any_fg = std::any_of(img.mask.data().begin(),
                                  img.mask.data().end(),
                                  [](std::uint8_t v) { return v != 0; });
  if (any_fg != (e.label == 1)) {
    throw ValidationError("label mismatch for " + e.category + "/" +
                          e.image_id + ": labels.csv says " +
                          std::to_string(e.label) + " but the mask " +
                          (any_fg ? "has" : "has no") + " foreground");
  }
  return img;
}

double ImageLevelScore(const ScoreMap& map, ImageScore mode,
                       const std::map<std::string, double>& sidecar,
                       const DatasetEntry& e) {
  switch (mode) {
    case ImageScore::kMax:
      return *std::max_element(map.data().begin(), map.data().end());
    case ImageScore::kMean: {
      double sum = 0.0;
      for (float v : map.data()) sum += v;
      return sum / static_cast<double>(map.size());
    }
    case ImageScore::kCsv: {
      auto it = sidecar.find(e.image_id);
      if (it == sidecar.end()) {
        throw ValidationError("image_scores.csv has no score for " +
                              e.category + "/" + e.image_id);
      }
      return it->second;
    }
  }
  return 0.0;
}

std::map<std::string, double> LoadSidecar(const std::vector<DatasetEntry>& es,
                                          const RunConfig& config) {
  std::map<std::string, double> out;
  if (config.image_score != ImageScore::kCsv || es.empty()) return out;
  const fs::path path = config.root / es.front().category / "image_scores.csv";
  for (const auto& [id, text] :
       ReadKeyedCsv(path, "image_id", config.open_counter)) {
    out[id] = ParseDouble(text, path.string());
  }
  return out;
}

BinSpec AutoRange(const std::vector<DatasetEntry>& es,
                  const RunConfig& config,
                  const std::map<std::string, double>& sidecar) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const DatasetEntry& e : es) {
    const ScoreMap map = read_npy(e.score_path, config.open_counter);
    for (float v : map.data()) {
      if (!std::isfinite(v)) {
        throw DomainError("non-finite score in " + e.score_path.string());
      }
      lo = std::min<double>(lo, v);
      hi = std::max<double>(hi, v);
    }
  }
  for (const auto& [id, v] : sidecar) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo < hi)) hi = lo + 1.0;
  return BinSpec(lo, hi, config.bins);
}

CategoryReport StreamingRow(const std::string& category,
                            const std::vector<DatasetEntry>& es,
                            const RunConfig& config, std::uint64_t* clamped) {
  const std::map<std::string, double> sidecar = LoadSidecar(es, config);
  const BinSpec spec =
      config.range ? BinSpec(config.range->first, config.range->second,
                             config.bins)
                   : AutoRange(es, config, sidecar);

  const unsigned workers = std::max(1u, config.workers);
  std::vector<StreamState> states(workers, StreamState(spec));
  std::atomic<std::size_t> next{0};
  std::mutex audit_mu;
  // First failure by image index, so the reported error does not depend on
  // scheduling.
  std::mutex error_mu;
  std::size_t error_index = es.size();
  std::exception_ptr error;

  auto work = [&](StreamState& state) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= es.size()) return;
      try {
        const DatasetEntry& e = es[i];
        LoadedImage img = LoadImage(e, config.open_counter);
        state.image.add(ImageLevelScore(img.scores, config.image_score,
                                        sidecar, e),
                        e.label == 1);

        std::vector<std::uint8_t> labels(img.mask.size());
        for (std::size_t p = 0; p < labels.size(); ++p) {
          labels[p] = img.mask.data()[p] != 0 ? 1 : 0;
        }
        const std::size_t cols = img.scores.cols();
        const std::size_t step =
            (config.batch_rows == 0 ? img.scores.rows() : config.batch_rows) *
            cols;
        const std::span<const float> all_scores(img.scores.data());
        const std::span<const std::uint8_t> all_labels(labels);
        for (std::size_t off = 0; off < labels.size(); off += step) {
          const std::size_t len = std::min(step, labels.size() - off);
          state.pixel.accumulate(SampleBatch{all_scores.subspan(off, len),
                                             all_labels.subspan(off, len)});
        }
        state.regions.accumulate(
            img.scores, label_components(img.mask, config.connectivity));
        ++state.images_done;

        if (config.audit) {
          AccumulatorAudit audit{category, state.images_done,
                                 state.regions.region_count(),
                                 state.counters(),
                                 img.scores.size() * sizeof(float) +
                                     img.mask.size()};
          std::lock_guard<std::mutex> lock(audit_mu);
          config.audit(audit);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  if (workers == 1) {
    work(states[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back(work, std::ref(states[w]));
    }
    for (std::thread& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  // Counts merge exactly, and aupro does not depend on region order, so the
  // merge order cannot change the result.
  StreamState total = std::move(states[0]);
  for (unsigned w = 1; w < workers; ++w) {
    total.image += states[w].image;
    total.pixel += states[w].pixel;
    total.regions += states[w].regions;
  }
  if (clamped) {
    *clamped += total.image.clamped() + total.pixel.clamped();
  }

  return make_category_report(
      category, auroc(total.image), average_precision(total.image),
      f1_max(total.image).value, auroc(total.pixel),
      average_precision(total.pixel), f1_max(total.pixel).value,
      aupro(total.regions, config.fpr_limit), iou_max(total.pixel).value);
}

CategoryReport ExactRow(const std::string& category,
                        const std::vector<DatasetEntry>& es,
                        const RunConfig& config) {
  const std::map<std::string, double> sidecar = LoadSidecar(es, config);
  RawSampleStore image;
  RawSampleStore pixel;
  std::vector<ScoreMap> maps;
  std::vector<Mask> masks;
  maps.reserve(es.size());
  masks.reserve(es.size());
  for (const DatasetEntry& e : es) {
    LoadedImage img = LoadImage(e, config.open_counter);
    image.append(ImageLevelScore(img.scores, config.image_score, sidecar, e),
                 static_cast<std::uint8_t>(e.label));
    for (std::size_t p = 0; p < img.scores.size(); ++p) {
      pixel.append(img.scores.data()[p], img.mask.data()[p] != 0 ? 1 : 0);
    }
    maps.push_back(std::move(img.scores));
    masks.push_back(std::move(img.mask));
  }
  return make_category_report(
      category, exact_auroc(image), exact_ap(image), exact_f1_max(image).value,
      exact_auroc(pixel), exact_ap(pixel), exact_f1_max(pixel).value,
      pro_exact(maps, masks, config.fpr_limit, config.connectivity),
      exact_iou_max(pixel).value);
}

void AddDeltas(const CategoryReport& s, const CategoryReport& x,
               std::vector<MetricDelta>& out) {
  const std::array<std::pair<const char*, double CategoryReport::*>, 8> m = {{
      {"img_auroc", &CategoryReport::img_auroc},
      {"img_ap", &CategoryReport::img_ap},
      {"img_f1max", &CategoryReport::img_f1max},
      {"px_auroc", &CategoryReport::px_auroc},
      {"px_ap", &CategoryReport::px_ap},
      {"px_f1max", &CategoryReport::px_f1max},
      {"aupro", &CategoryReport::aupro},
      {"iou_max", &CategoryReport::iou_max},
  }};
  for (const auto& [name, field] : m) {
    out.push_back({s.category, name, s.*field, x.*field});
  }
}

}  // namespace

std::vector<DatasetEntry> scan_dataset(const fs::path& root,
                                       const std::vector<std::string>& filter,
                                       bool validate_shapes,
                                       OpenCounter* counter) {
  std::vector<DatasetEntry> entries;
  for (const std::string& category : ListCategories(root, filter)) {
    const fs::path dir = root / category;
    const fs::path labels_path = dir / "labels.csv";
    if (!fs::exists(labels_path)) {
      throw ValidationError("missing " + labels_path.string());
    }
    const auto labels = ReadKeyedCsv(labels_path, "image_id", counter);

    std::vector<std::string> ids;
    for (const fs::directory_entry& f : fs::directory_iterator(dir / "scores")) {
      if (f.is_regular_file() && f.path().extension() == ".npy") {
        ids.push_back(f.path().stem().string());
      }
    }
    std::sort(ids.begin(), ids.end());

    for (const std::string& id : ids) {
      DatasetEntry e;
      e.category = category;
      e.image_id = id;
      e.score_path = dir / "scores" / (id + ".npy");
      const fs::path mask = dir / "masks" / (id + ".png");
      if (fs::exists(mask)) e.mask_path = mask;

      auto it = labels.find(id);
      if (it == labels.end()) {
        throw ValidationError(labels_path.string() + " has no label for " +
                              id);
      }
      if (it->second == "0") {
        e.label = 0;
      } else if (it->second == "1") {
        e.label = 1;
      } else {
        throw ValidationError(labels_path.string() + ": label for " + id +
                              " must be 0 or 1, got '" + it->second + "'");
      }
      if (e.label == 1 && !e.mask_path) {
        throw ValidationError("anomalous image without mask: " +
                              mask.string());
      }
      if (validate_shapes && e.mask_path) {
        const Shape s = read_npy_shape(e.score_path, counter);
        const Shape m = read_png_shape(*e.mask_path, counter);
        if (!(s == m)) {
          throw ValidationError("shape mismatch: " + e.score_path.string() +
                                " is " + s.ToString() + " but " +
                                e.mask_path->string() + " is " +
                                m.ToString());
        }
      }
      entries.push_back(std::move(e));
    }
  }
  return entries;
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "streaming") return EvalMode::kStreaming;
  if (name == "exact") return EvalMode::kExact;
  if (name == "differential") return EvalMode::kDifferential;
  throw UsageError("unknown mode '" + std::string(name) +
                   "' (expected streaming, exact or differential)");
}

ImageScore parse_image_score(std::string_view name) {
  if (name == "max") return ImageScore::kMax;
  if (name == "mean") return ImageScore::kMean;
  if (name == "csv") return ImageScore::kCsv;
  throw UsageError("unknown image score '" + std::string(name) +
                   "' (expected max, mean or csv)");
}

void validate(const RunConfig& config) {
  if (config.bins < 2) {
    throw UsageError("--bins must be at least 2");
  }
  if (!(config.fpr_limit > 0.0 && config.fpr_limit <= 1.0)) {
    throw UsageError("--fpr-limit must lie in (0, 1]");
  }
  if (config.workers < 1) {
    throw UsageError("--workers must be at least 1");
  }
  if (config.connectivity != 4 && config.connectivity != 8) {
    throw UsageError("--connectivity must be 4 or 8");
  }
  if (config.range && !(config.range->first < config.range->second)) {
    throw UsageError("--range needs lo < hi");
  }
}

bool RunResult::differential_ok() const {
  return std::all_of(deltas.begin(), deltas.end(), [&](const MetricDelta& d) {
    return d.delta() <= tolerance;
  });
}

RunResult run_eval(const RunConfig& config) {
  validate(config);
  const std::vector<std::string> categories =
      ListCategories(config.root, config.categories);
  if (categories.empty()) {
    throw ValidationError("no categories found under " + config.root.string());
  }

  RunResult result;
  result.tolerance = 2.0 / static_cast<double>(config.bins);
  std::vector<CategoryReport> rows;
  for (const std::string& category : categories) {
    try {
      // Headers are not pre-read, so each file is opened once; shapes are
      // checked when the image is decoded.
      const std::vector<DatasetEntry> group = scan_dataset(
          config.root, {category}, false, config.open_counter);
      if (group.empty()) {
        throw ValidationError("category has no score maps: " + category);
      }
      switch (config.mode) {
        case EvalMode::kStreaming:
          rows.push_back(StreamingRow(category, group, config,
                                      &result.clamped));
          break;
        case EvalMode::kExact:
          rows.push_back(ExactRow(category, group, config));
          break;
        case EvalMode::kDifferential: {
          CategoryReport s =
              StreamingRow(category, group, config, &result.clamped);
          AddDeltas(s, ExactRow(category, group, config), result.deltas);
          rows.push_back(std::move(s));
          break;
        }
      }
    } catch (const Error& e) {
      result.failures.push_back({category, e.what()});
    }
  }
  if (!rows.empty()) result.report = make_suite_report(std::move(rows));
  return result;
}

unsigned default_workers() {
  const char* env = std::getenv("STREAMEVAL_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  unsigned v = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
    throw UsageError("STREAMEVAL_WORKERS must be a positive integer, got '" +
                     std::string(text) + "'");
  }
  return v;
}

}  // namespace streameval
