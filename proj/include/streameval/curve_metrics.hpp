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

// Threshold-sweep metrics over a ScoreHistogramPair.
//
// Every metric sweeps the N+1 grid thresholds thr_0..thr_N of the pair's
// BinSpec, predicting "anomalous" for scores >= thr_k. Counts at thr_k are
// suffix sums of the bin counts, so nothing here touches raw samples.

#ifndef STREAMEVAL_CURVE_METRICS_HPP_
#define STREAMEVAL_CURVE_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streameval/hist_core.hpp"

namespace streameval {

struct RocPoint {
  double thr;
  double tpr;
  double fpr;
};

struct ConfusionAtThreshold {
  double thr;
  std::uint64_t tp;
  std::uint64_t fp;
  std::uint64_t fn;
  std::uint64_t tn;
};

// A maximised metric value and the grid threshold that attains it.
struct ThresholdedScore {
  double value;
  double thr;
};

// Confusion counts at each of the N+1 grid thresholds, thr ascending.
std::vector<ConfusionAtThreshold> confusion_sweep(
    const ScoreHistogramPair& pair);

// N+1 points ordered by increasing threshold. Throws UndefinedMetricError if
// either class is empty.
std::vector<RocPoint> roc_points(const ScoreHistogramPair& pair);

// Trapezoidal area under roc_points().
double auroc(const ScoreHistogramPair& pair);

// Step-interpolated average precision, sum over k of (R_k - R_{k+1}) * P_k.
// Requires positives; negatives may be absent.
double average_precision(const ScoreHistogramPair& pair);

// max_k F1 and max_k IoU over the grid; ties go to the largest threshold.
ThresholdedScore f1_max(const ScoreHistogramPair& pair);
ThresholdedScore iou_max(const ScoreHistogramPair& pair);

// Pointwise F1 and Jaccard from confusion counts; 0 when undefined.
double f1_score(const ConfusionAtThreshold& c);
double iou_score(const ConfusionAtThreshold& c);

}  // namespace streameval

#endif  // STREAMEVAL_CURVE_METRICS_HPP_
