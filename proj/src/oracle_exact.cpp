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

#include "streameval/oracle_exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>
#include <utility>

#include "streameval/errors.hpp"

namespace streameval {

void RawSampleStore::append(double score, std::uint8_t label) {
  if (!std::isfinite(score)) {
    throw DomainError("non-finite score: " + std::to_string(score));
  }
  if (label > 1) {
    throw DomainError("label must be 0 or 1, got " + std::to_string(label));
  }
  scores_.push_back(score);
  labels_.push_back(label);
  positives_ += label;
}

void RawSampleStore::append(std::span<const float> scores,
                            std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("batch has " + std::to_string(scores.size()) +
                         " scores but " + std::to_string(labels.size()) +
                         " labels");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    append(static_cast<double>(scores[i]), labels[i]);
  }
}

namespace {

// Sample indices ordered by descending score.
std::vector<std::size_t> DescendingOrder(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

// Cumulative counts at one distinct-score cut.
struct Cut {
  double thr;
  std::uint64_t tp;
  std::uint64_t fp;
};

// One cut per distinct score, in descending score order.
std::vector<Cut> DistinctCuts(const RawSampleStore& store) {
  const std::vector<double>& s = store.scores();
  const std::vector<std::size_t> order = DescendingOrder(s);
  std::vector<Cut> cuts;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t idx = order[i];
    if (store.labels()[idx]) {
      ++tp;
    } else {
      ++fp;
    }
    if (i + 1 == order.size() || s[order[i + 1]] != s[idx]) {
      cuts.push_back({s[idx], tp, fp});
    }
  }
  return cuts;
}

void RequirePositives(const RawSampleStore& store, const char* metric) {
  if (store.positives() == 0) {
    throw UndefinedMetricError(std::string(metric) +
                               " undefined: no positive samples");
  }
}

template <typename ScoreFn>
ExactThresholded BestCut(const RawSampleStore& store, ScoreFn score) {
  const std::vector<Cut> cuts = DistinctCuts(store);
  // Descending sweep with a strict comparison keeps the largest threshold on
  // ties.
  ExactThresholded best{-1.0, 0.0};
  for (const Cut& c : cuts) {
    const double v = score(c, static_cast<std::uint64_t>(store.positives()));
    if (v > best.value) best = {v, c.thr};
  }
  return best;
}

}  // namespace

double exact_auroc(const RawSampleStore& store) {
  RequirePositives(store, "AUROC");
  if (store.negatives() == 0) {
    throw UndefinedMetricError("AUROC undefined: no negative samples");
  }
  const std::vector<double>& s = store.scores();
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });

  // Twice the Mann-Whitney U: 2 per ordered pair, 1 per tied pair.
  unsigned __int128 twice_u = 0;
  std::uint64_t neg_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t pos_group = 0;
    std::uint64_t neg_group = 0;
    while (j < order.size() && s[order[j]] == s[order[i]]) {
      if (store.labels()[order[j]]) {
        ++pos_group;
      } else {
        ++neg_group;
      }
      ++j;
    }
    twice_u += static_cast<unsigned __int128>(pos_group) * (2 * neg_below) +
               static_cast<unsigned __int128>(pos_group) * neg_group;
    neg_below += neg_group;
    i = j;
  }
  const unsigned __int128 twice_pq =
      static_cast<unsigned __int128>(2 * store.positives()) *
      store.negatives();
  return static_cast<double>(twice_u) / static_cast<double>(twice_pq);
}

double exact_ap(const RawSampleStore& store) {
  RequirePositives(store, "average precision");
  double weighted = 0.0;
  std::uint64_t tp_prev = 0;
  for (const Cut& c : DistinctCuts(store)) {
    if (c.tp > tp_prev) {
      weighted += static_cast<double>(c.tp - tp_prev) *
                  (static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp));
    }
    tp_prev = c.tp;
  }
  return weighted / static_cast<double>(store.positives());
}

ExactThresholded exact_f1_max(const RawSampleStore& store) {
  RequirePositives(store, "F1-max");
  return BestCut(store, [](const Cut& c, std::uint64_t pos) {
    // One division of exact integers, so equal ratios compare equal and the
    // tie rule holds.
    const std::uint64_t fn = pos - c.tp;
    return static_cast<double>(2 * c.tp) /
           static_cast<double>(2 * c.tp + c.fp + fn);
  });
}

ExactThresholded exact_iou_max(const RawSampleStore& store) {
  RequirePositives(store, "IoU-max");
  return BestCut(store, [](const Cut& c, std::uint64_t pos) {
    const std::uint64_t fn = pos - c.tp;
    return static_cast<double>(c.tp) /
           static_cast<double>(c.tp + c.fp + fn);
  });
}

std::size_t flood_fill_labels(const Mask& mask, int connectivity,
                              Grid<std::int32_t>& labels) {
  if (connectivity != 4 && connectivity != 8) {
    throw DomainError("connectivity must be 4 or 8, got " +
                      std::to_string(connectivity));
  }
  labels = Grid<std::int32_t>(mask.shape(), 0);
  const auto rows = static_cast<long>(mask.rows());
  const auto cols = static_cast<long>(mask.cols());
  std::int32_t next = 0;
  std::deque<std::pair<long, long>> queue;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (mask(r, c) == 0 || labels(r, c) != 0) continue;
      ++next;
      labels(r, c) = next;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [pr, pc] = queue.front();
        queue.pop_front();
        for (long dr = -1; dr <= 1; ++dr) {
          for (long dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (connectivity == 4 && dr != 0 && dc != 0) continue;
            const long nr = pr + dr;
            const long nc = pc + dc;
            if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
            if (mask(nr, nc) == 0 || labels(nr, nc) != 0) continue;
            labels(nr, nc) = next;
            queue.emplace_back(nr, nc);
          }
        }
      }
    }
  }
  return static_cast<std::size_t>(next);
}

double pro_exact(std::span<const ScoreMap> score_maps,
                 std::span<const Mask> masks, double fpr_limit,
                 int connectivity) {
  if (!(fpr_limit > 0.0 && fpr_limit <= 1.0)) {
    throw DomainError("fpr_limit must lie in (0, 1], got " +
                      std::to_string(fpr_limit));
  }
  if (score_maps.size() != masks.size()) {
    throw DimensionError(std::to_string(score_maps.size()) +
                         " score maps but " + std::to_string(masks.size()) +
                         " masks");
  }

  // Every pixel with its score and its global region (-1 for background).
  std::vector<double> scores;
  std::vector<long> region;
  std::vector<std::uint64_t> region_size;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!(score_maps[i].shape() == masks[i].shape())) {
      throw DimensionError("score map is " + score_maps[i].shape().ToString() +
                           " but mask is " + masks[i].shape().ToString());
    }
    Grid<std::int32_t> labels;
    const std::size_t n = flood_fill_labels(masks[i], connectivity, labels);
    const long base = static_cast<long>(region_size.size());
    region_size.resize(region_size.size() + n, 0);
    for (std::size_t p = 0; p < labels.size(); ++p) {
      const double s = score_maps[i].data()[p];
      if (!std::isfinite(s)) {
        throw DomainError("non-finite score in score map");
      }
      scores.push_back(s);
      const std::int32_t l = labels.data()[p];
      if (l == 0) {
        region.push_back(-1);
      } else {
        region.push_back(base + l - 1);
        ++region_size[static_cast<std::size_t>(base + l - 1)];
      }
    }
  }
  if (region_size.empty()) {
    throw UndefinedMetricError("PRO undefined: no ground-truth regions");
  }
  const auto n_bg = static_cast<std::uint64_t>(
      std::count(region.begin(), region.end(), -1L));
  if (n_bg == 0) {
    throw UndefinedMetricError("PRO undefined: no background pixels");
  }

  // Sweep distinct scores from the top. Each cut adds one (FPR, PRO) point.
  const std::vector<std::size_t> order = DescendingOrder(scores);
  // x holds raw false-positive counts; see the division at the end.
  std::vector<double> fpr{0.0};
  std::vector<double> pro{0.0};
  std::vector<std::uint64_t> hits(region_size.size(), 0);
  std::uint64_t fp = 0;
  const double n_regions = static_cast<double>(region_size.size());
  const double limit = fpr_limit * static_cast<double>(n_bg);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t idx = order[i];
    if (region[idx] < 0) {
      ++fp;
    } else {
      ++hits[static_cast<std::size_t>(region[idx])];
    }
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[idx]) continue;
    double overlap = 0.0;
    for (std::size_t r = 0; r < hits.size(); ++r) {
      overlap += static_cast<double>(hits[r]) /
                 static_cast<double>(region_size[r]);
    }
    fpr.push_back(static_cast<double>(fp));
    pro.push_back(overlap / n_regions);
    if (fpr.back() >= limit) break;
  }

  double area = 0.0;
  for (std::size_t i = 1; i < fpr.size(); ++i) {
    const double x0 = fpr[i - 1];
    const double x1 = fpr[i];
    if (x0 >= limit) break;
    if (x1 <= limit) {
      area += (x1 - x0) * (pro[i - 1] + pro[i]) / 2.0;
    } else {
      const double y_lim =
          pro[i - 1] + (pro[i] - pro[i - 1]) * (limit - x0) / (x1 - x0);
      area += (limit - x0) * (pro[i - 1] + y_lim) / 2.0;
      break;
    }
  }
  return std::min(1.0, area / limit);
}

}  // namespace streameval
