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

// Seeded synthetic datasets for tests and benchmarks.
//
// Masks are unions of random rectangles and ellipses. Scores are clamped
// mask-correlated noise: with separation s, background pixels centre on
// 0.5 - 0.3s and anomalous pixels on 0.5 + 0.3s, plus Gaussian noise scaled
// by (1 - s) and a bounded uniform jitter. At s = 1 every anomalous pixel
// scores above 0.6 and every background pixel below 0.4; at s = 0 both
// classes share one distribution.

#ifndef STREAMEVAL_SYNTHETIC_HPP_
#define STREAMEVAL_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "streameval/image.hpp"

namespace streameval {

// splitmix64; identical streams on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct AnomalyProfile {
  double separation = 0.7;
  // Probability that an image is anomalous. Image 0 of every category is
  // always normal and image 1 always anomalous.
  double anomaly_fraction = 0.5;
  int max_shapes = 3;
};

struct SyntheticImage {
  std::string id;
  ScoreMap scores;
  Mask mask;  // 0 or 255
  int label = 0;
};

// One category's images, deterministic in (seed, category_index).
std::vector<SyntheticImage> generate_category(std::uint64_t seed,
                                              std::size_t category_index,
                                              std::size_t n_images,
                                              Shape shape,
                                              const AnomalyProfile& profile);

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::size_t n_categories = 1;
  std::size_t n_images = 16;
  Shape shape{64, 64};
  // Category c uses separations[c % separations.size()].
  std::vector<double> separations{0.7};
  AnomalyProfile profile;
  bool force = false;
};

// Category directory name for index c: "cat_000", "cat_001", ...
std::string synthetic_category_name(std::size_t c);

// Writes a dataset tree under out_dir. Throws UsageError if out_dir exists
// and is not empty unless spec.force, and DomainError for shapes under 8x8.
void gen_synthetic(const std::filesystem::path& out_dir,
                   const SyntheticSpec& spec);

}  // namespace streameval

#endif  // STREAMEVAL_SYNTHETIC_HPP_
