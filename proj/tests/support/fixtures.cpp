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

#include "support/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <sstream>

#include <unistd.h>

#include "streameval/io.hpp"

namespace streameval::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("streameval-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::size_t LabelledSamples::positives() const {
  return static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

RawSampleStore LabelledSamples::store() const {
  RawSampleStore s;
  s.append(scores, labels);
  return s;
}

ScoreHistogramPair LabelledSamples::pair(const BinSpec& spec) const {
  ScoreHistogramPair p(spec);
  p.accumulate(SampleBatch{scores, labels});
  return p;
}

LabelledSamples RandomSamples(SplitMix64& rng, std::size_t n, double lo,
                              double hi, double p_pos, bool both_classes) {
  LabelledSamples out;
  out.scores.reserve(n);
  out.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.scores.push_back(static_cast<float>(rng.uniform(lo, hi)));
    std::uint8_t label = rng.uniform() < p_pos ? 1 : 0;
    if (both_classes && i < 2) label = i == 0 ? 1 : 0;
    out.labels.push_back(label);
  }
  return out;
}

LabelledSamples GaussianSamples(SplitMix64& rng, std::size_t n, double p_pos,
                                double mu_pos, double mu_neg, double sigma) {
  LabelledSamples out;
  out.scores.reserve(n);
  out.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = rng.uniform() < p_pos;
    const double v = (pos ? mu_pos : mu_neg) + sigma * rng.normal();
    out.scores.push_back(static_cast<float>(std::clamp(v, 0.0, 1.0)));
    out.labels.push_back(pos ? 1 : 0);
  }
  return out;
}

LabelledSamples BinInteriorSamples(SplitMix64& rng, const BinSpec& spec,
                                   std::size_t n, double p_pos) {
  LabelledSamples out;
  const double width = (spec.hi() - spec.lo()) /
                       static_cast<double>(spec.n_bins());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = rng.below(spec.n_bins());
    const double v = spec.edge(k) + (0.25 + 0.5 * rng.uniform()) * width;
    out.scores.push_back(static_cast<float>(v));
    std::uint8_t label = rng.uniform() < p_pos ? 1 : 0;
    if (i < 2) label = i == 0 ? 1 : 0;
    out.labels.push_back(label);
  }
  return out;
}

BinSpec RandomBinSpec(SplitMix64& rng, std::size_t max_bins) {
  const double lo = rng.uniform(-10.0, 10.0);
  const double hi = lo + rng.uniform(0.5, 20.0);
  const std::size_t n = 2 + rng.below(max_bins - 1);
  return BinSpec(lo, hi, n);
}

Mask RandomMask(SplitMix64& rng, Shape shape, int max_blobs) {
  Mask mask(shape, 0);
  const int blobs = 1 + static_cast<int>(rng.below(max_blobs));
  for (int b = 0; b < blobs; ++b) {
    const std::size_t h = 1 + rng.below(std::max<std::size_t>(1, shape.rows / 3));
    const std::size_t w = 1 + rng.below(std::max<std::size_t>(1, shape.cols / 3));
    const std::size_t r0 = rng.below(shape.rows - h + 1);
    const std::size_t c0 = rng.below(shape.cols - w + 1);
    for (std::size_t r = r0; r < r0 + h; ++r) {
      for (std::size_t c = c0; c < c0 + w; ++c) mask(r, c) = 255;
    }
  }
  return mask;
}

ScoreMap CorrelatedScores(SplitMix64& rng, const Mask& mask,
                          double separation) {
  ScoreMap map(mask.shape(), 0.0f);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool fg = mask.data()[i] != 0;
    const double v = 0.5 + (fg ? 0.3 : -0.3) * separation +
                     (1.0 - separation) * 0.25 * rng.normal() +
                     rng.uniform(-0.1, 0.1);
    map.data()[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return map;
}

void WriteCategory(const fs::path& root, const std::string& category,
                   const std::vector<FixtureImage>& images) {
  const fs::path dir = root / category;
  fs::create_directories(dir / "scores");
  fs::create_directories(dir / "masks");
  std::string labels = "image_id,label\r\n";
  for (const FixtureImage& img : images) {
    write_npy(dir / "scores" / (img.id + ".npy"), img.scores);
    if (img.label == 1) {
      write_png_mask(dir / "masks" / (img.id + ".png"), img.mask);
    }
    labels += img.id + "," + std::to_string(img.label) + "\r\n";
  }
  write_text_file(dir / "labels.csv", labels);
}

std::vector<std::pair<std::string, std::string>> ReadTree(
    const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    out.emplace_back(fs::relative(e.path(), root).generic_string(),
                     std::move(bytes));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace streameval::testing
