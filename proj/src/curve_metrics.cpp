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

#include "streameval/curve_metrics.hpp"

#include <string>

#include "streameval/errors.hpp"

namespace streameval {

namespace {

void RequirePositives(const ScoreHistogramPair& pair, const char* metric) {
  if (pair.pos().total() == 0) {
    throw UndefinedMetricError(std::string(metric) +
                               " undefined: no positive samples");
  }
}

void RequireBothClasses(const ScoreHistogramPair& pair, const char* metric) {
  RequirePositives(pair, metric);
  if (pair.neg().total() == 0) {
    throw UndefinedMetricError(std::string(metric) +
                               " undefined: no negative samples");
  }
}

template <typename ScoreFn>
ThresholdedScore MaxOverGrid(const ScoreHistogramPair& pair, ScoreFn score) {
  ThresholdedScore best{0.0, pair.spec().edge(0)};
  // Ascending sweep with >= so the largest threshold wins ties.
  for (const ConfusionAtThreshold& c : confusion_sweep(pair)) {
    const double v = score(c);
    if (v >= best.value) best = {v, c.thr};
  }
  return best;
}

}  // namespace

std::vector<ConfusionAtThreshold> confusion_sweep(
    const ScoreHistogramPair& pair) {
  const std::vector<std::uint64_t> tp = suffix_sums(pair.pos());
  const std::vector<std::uint64_t> fp = suffix_sums(pair.neg());
  const std::uint64_t n_pos = pair.pos().total();
  const std::uint64_t n_neg = pair.neg().total();
  std::vector<ConfusionAtThreshold> out(tp.size());
  for (std::size_t k = 0; k < tp.size(); ++k) {
    out[k] = {pair.spec().edge(k), tp[k], fp[k], n_pos - tp[k],
              n_neg - fp[k]};
  }
  return out;
}

std::vector<RocPoint> roc_points(const ScoreHistogramPair& pair) {
  RequireBothClasses(pair, "ROC");
  const std::vector<std::uint64_t> tp = suffix_sums(pair.pos());
  const std::vector<std::uint64_t> fp = suffix_sums(pair.neg());
  const double n_pos = static_cast<double>(pair.pos().total());
  const double n_neg = static_cast<double>(pair.neg().total());
  std::vector<RocPoint> out(tp.size());
  for (std::size_t k = 0; k < tp.size(); ++k) {
    out[k] = {pair.spec().edge(k), static_cast<double>(tp[k]) / n_pos,
              static_cast<double>(fp[k]) / n_neg};
  }
  return out;
}

double auroc(const ScoreHistogramPair& pair) {
  RequireBothClasses(pair, "AUROC");
  const std::vector<std::uint64_t> tp = suffix_sums(pair.pos());
  const std::vector<std::uint64_t> fp = suffix_sums(pair.neg());
  // Twice the trapezoid area in units of 1/(P*Q), summed exactly. This is the
  // same sum as integrating roc_points(), without per-point rounding.
  unsigned __int128 twice_area = 0;
  for (std::size_t k = 0; k + 1 < tp.size(); ++k) {
    twice_area += static_cast<unsigned __int128>(tp[k] + tp[k + 1]) *
                  (fp[k] - fp[k + 1]);
  }
  const unsigned __int128 twice_pq =
      static_cast<unsigned __int128>(2 * pair.pos().total()) *
      pair.neg().total();
  return static_cast<double>(twice_area) / static_cast<double>(twice_pq);
}

double average_precision(const ScoreHistogramPair& pair) {
  RequirePositives(pair, "average precision");
  const std::vector<std::uint64_t> tp = suffix_sums(pair.pos());
  const std::vector<std::uint64_t> fp = suffix_sums(pair.neg());
  double weighted = 0.0;
  for (std::size_t k = 0; k + 1 < tp.size(); ++k) {
    const std::uint64_t gained = tp[k] - tp[k + 1];
    if (gained == 0) continue;
    const double precision =
        static_cast<double>(tp[k]) / static_cast<double>(tp[k] + fp[k]);
    weighted += static_cast<double>(gained) * precision;
  }
  return weighted / static_cast<double>(pair.pos().total());
}

double f1_score(const ConfusionAtThreshold& c) {
  if (c.tp == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) /
         static_cast<double>(2 * c.tp + c.fp + c.fn);
}

double iou_score(const ConfusionAtThreshold& c) {
  if (c.tp == 0) return 0.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp + c.fn);
}

ThresholdedScore f1_max(const ScoreHistogramPair& pair) {
  RequirePositives(pair, "F1-max");
  return MaxOverGrid(pair, f1_score);
}

ThresholdedScore iou_max(const ScoreHistogramPair& pair) {
  RequirePositives(pair, "IoU-max");
  return MaxOverGrid(pair, iou_score);
}

}  // namespace streameval
