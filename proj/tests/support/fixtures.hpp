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

#ifndef STREAMEVAL_TESTS_SUPPORT_FIXTURES_HPP_
#define STREAMEVAL_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "streameval/hist_core.hpp"
#include "streameval/image.hpp"
#include "streameval/oracle_exact.hpp"
#include "streameval/synthetic.hpp"

namespace streameval::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Labelled samples held both as floats and as a RawSampleStore.
struct LabelledSamples {
  std::vector<float> scores;
  std::vector<std::uint8_t> labels;

  std::size_t positives() const;
  RawSampleStore store() const;
  ScoreHistogramPair pair(const BinSpec& spec) const;
};

// n uniform scores in [lo, hi) with labels drawn at rate p_pos. When
// both_classes is set, the first two samples are forced to 1 and 0.
LabelledSamples RandomSamples(SplitMix64& rng, std::size_t n, double lo,
                              double hi, double p_pos, bool both_classes);

// Scores drawn from class-conditional normals clamped to [0, 1]: positives
// around mu_pos, negatives around mu_neg, both with the given sigma.
LabelledSamples GaussianSamples(SplitMix64& rng, std::size_t n, double p_pos,
                                double mu_pos, double mu_neg, double sigma);

// Scores placed in the middle half of random bins of spec, so that small
// floating-point perturbations never move a score to another bin.
LabelledSamples BinInteriorSamples(SplitMix64& rng, const BinSpec& spec,
                                   std::size_t n, double p_pos);

// A random grid over a random range with 2..max_bins bins.
BinSpec RandomBinSpec(SplitMix64& rng, std::size_t max_bins);

// Union of 1..max_blobs random rectangles, values 0 or 255.
Mask RandomMask(SplitMix64& rng, Shape shape, int max_blobs);

// Mask-correlated scores in [0, 1]: foreground centred above background.
ScoreMap CorrelatedScores(SplitMix64& rng, const Mask& mask,
                          double separation);

// One image of a dataset fixture.
struct FixtureImage {
  std::string id;
  ScoreMap scores;
  Mask mask;  // all zero for normal images
  int label = 0;
};

// Writes root/<category>/{scores,masks,labels.csv} for the images.
void WriteCategory(const std::filesystem::path& root,
                   const std::string& category,
                   const std::vector<FixtureImage>& images);

// Reads every regular file under root into (relative path, bytes) pairs,
// sorted by path.
std::vector<std::pair<std::string, std::string>> ReadTree(
    const std::filesystem::path& root);

}  // namespace streameval::testing

#endif  // STREAMEVAL_TESTS_SUPPORT_FIXTURES_HPP_
