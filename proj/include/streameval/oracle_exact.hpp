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

// Exact store-everything metrics.
//
// These keep every sample and sweep every distinct score as a threshold. They
// are the reference the histogram path is tested against, and the slow path
// for datasets small enough to hold in memory. Nothing in here shares code
// with curve_metrics or region_pro.

#ifndef STREAMEVAL_ORACLE_EXACT_HPP_
#define STREAMEVAL_ORACLE_EXACT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "streameval/image.hpp"

namespace streameval {

class RawSampleStore {
 public:
  // Throws DomainError for non-finite scores or labels outside {0,1}.
  void append(double score, std::uint8_t label);
  void append(std::span<const float> scores,
              std::span<const std::uint8_t> labels);

  const std::vector<double>& scores() const { return scores_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  std::size_t size() const { return scores_.size(); }
  std::size_t positives() const { return positives_; }
  std::size_t negatives() const { return scores_.size() - positives_; }

  // Bytes held by the sample arrays.
  std::size_t bytes() const {
    return scores_.capacity() * sizeof(double) + labels_.capacity();
  }

  void reserve(std::size_t n) {
    scores_.reserve(n);
    labels_.reserve(n);
  }

 private:
  std::vector<double> scores_;
  std::vector<std::uint8_t> labels_;
  std::size_t positives_ = 0;
};

struct ExactThresholded {
  double value;
  double thr;
};

// Mann-Whitney statistic with half credit for ties.
double exact_auroc(const RawSampleStore& store);

// Step-interpolated AP over every distinct score.
double exact_ap(const RawSampleStore& store);

// Maxima over every distinct score used as a ">=" cut; ties go to the
// largest threshold.
ExactThresholded exact_f1_max(const RawSampleStore& store);
ExactThresholded exact_iou_max(const RawSampleStore& store);

// Flood-fill regions, sweep every distinct pixel score, integrate PRO over
// FPR on [0, fpr_limit] with linear interpolation at the limit, and divide by
// fpr_limit.
double pro_exact(std::span<const ScoreMap> score_maps,
                 std::span<const Mask> masks, double fpr_limit,
                 int connectivity = 8);

// Breadth-first flood fill; labels in row-major first-pixel order, 0 for
// background. Returns the region count.
std::size_t flood_fill_labels(const Mask& mask, int connectivity,
                              Grid<std::int32_t>& labels);

}  // namespace streameval

#endif  // STREAMEVAL_ORACLE_EXACT_HPP_
