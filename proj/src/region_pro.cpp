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

#include "streameval/region_pro.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "streameval/errors.hpp"

namespace streameval {

namespace {

// Union-find over provisional labels. The root of a set is its smallest
// label.
class LabelSets {
 public:
  std::int32_t make() {
    const auto id = static_cast<std::int32_t>(parent_.size());
    parent_.push_back(id);
    return id;
  }

  std::int32_t find(std::int32_t x) {
    std::int32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::int32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  void join(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

MaskComponents label_components(const Mask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw DomainError("connectivity must be 4 or 8, got " +
                      std::to_string(connectivity));
  }
  const std::size_t rows = mask.rows();
  const std::size_t cols = mask.cols();
  // Provisional labels are 1-based; 0 marks background.
  Grid<std::int32_t> prov(mask.shape(), 0);
  LabelSets sets;
  sets.make();  // slot 0, never used for foreground

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (mask(r, c) == 0) continue;
      std::int32_t label = 0;
      auto visit = [&](std::size_t rr, std::size_t cc) {
        const std::int32_t n = prov(rr, cc);
        if (n == 0) return;
        if (label == 0) {
          label = n;
        } else {
          sets.join(label, n);
        }
      };
      if (c > 0) visit(r, c - 1);
      if (r > 0) {
        visit(r - 1, c);
        if (connectivity == 8) {
          if (c > 0) visit(r - 1, c - 1);
          if (c + 1 < cols) visit(r - 1, c + 1);
        }
      }
      prov(r, c) = label != 0 ? label : sets.make();
    }
  }

  MaskComponents out;
  out.labels = Grid<std::int32_t>(mask.shape(), 0);
  std::vector<std::int32_t> final_id(sets.size(), 0);
  for (std::size_t i = 0; i < prov.size(); ++i) {
    const std::int32_t p = prov.data()[i];
    if (p == 0) continue;
    const std::int32_t root = sets.find(p);
    if (final_id[root] == 0) {
      out.region_sizes.push_back(0);
      final_id[root] = static_cast<std::int32_t>(out.region_sizes.size());
    }
    out.labels.data()[i] = final_id[root];
    ++out.region_sizes[final_id[root] - 1];
  }
  return out;
}

// ---------------------------------------------------------------------------
// RegionAccumulator

RegionAccumulator::RegionAccumulator(BinSpec spec)
    : spec_(spec), neg_pixels_(spec) {}

void RegionAccumulator::accumulate(const ScoreMap& scores,
                                   const MaskComponents& comps) {
  if (!(scores.shape() == comps.labels.shape())) {
    throw DimensionError("score map is " + scores.shape().ToString() +
                         " but mask is " + comps.labels.shape().ToString());
  }
  for (float s : scores.data()) {
    if (!std::isfinite(s)) {
      throw DomainError("non-finite score in score map: " +
                        std::to_string(s));
    }
  }
  const std::size_t first = per_region_.size();
  per_region_.resize(first + comps.region_count(), Histogram(spec_));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::int32_t region = comps.labels.data()[i];
    const double s = scores.data()[i];
    if (region == 0) {
      neg_pixels_.add(s);
    } else {
      per_region_[first + static_cast<std::size_t>(region) - 1].add(s);
    }
  }
}

RegionAccumulator& RegionAccumulator::operator+=(
    const RegionAccumulator& other) {
  if (!(spec_ == other.spec_)) {
    throw IncompatibleSpecError("cannot merge region accumulators over " +
                                spec_.ToString() + " and " +
                                other.spec_.ToString());
  }
  neg_pixels_ += other.neg_pixels_;
  per_region_.insert(per_region_.end(), other.per_region_.begin(),
                     other.per_region_.end());
  return *this;
}

std::size_t RegionAccumulator::counter_count() const {
  return (per_region_.size() + 1) * spec_.n_bins();
}

std::uint64_t RegionAccumulator::clamped() const {
  std::uint64_t n = neg_pixels_.clamped();
  for (const Histogram& h : per_region_) n += h.clamped();
  return n;
}

ProCurve pro_curve(const RegionAccumulator& acc) {
  if (acc.region_count() == 0) {
    throw UndefinedMetricError("PRO undefined: no ground-truth regions");
  }
  if (acc.neg_pixels().total() == 0) {
    throw UndefinedMetricError("PRO undefined: no background pixels");
  }
  const std::size_t n = acc.spec().n_bins();

  // Regions of equal size share a denominator, so their suffix counts can be
  // summed exactly first. Summing the per-size fractions in ascending size
  // order then makes the result independent of region order.
  std::map<std::uint64_t, std::vector<std::uint64_t>> by_size;
  for (const Histogram& h : acc.per_region()) {
    std::vector<std::uint64_t>& sums = by_size[h.total()];
    if (sums.empty()) sums.assign(n + 1, 0);
    const std::vector<std::uint64_t> s = suffix_sums(h);
    for (std::size_t k = 0; k <= n; ++k) sums[k] += s[k];
  }

  const double regions = static_cast<double>(acc.region_count());
  const std::vector<std::uint64_t> fp = suffix_sums(acc.neg_pixels());
  const double n_neg = static_cast<double>(acc.neg_pixels().total());
  ProCurve curve;
  curve.fpr.resize(n + 1);
  curve.pro.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    double overlap = 0.0;
    for (const auto& [size, sums] : by_size) {
      overlap += static_cast<double>(sums[k]) / static_cast<double>(size);
    }
    curve.pro[k] = overlap / regions;
    curve.fpr[k] = static_cast<double>(fp[k]) / n_neg;
  }
  return curve;
}

double trapezoid_up_to(const std::vector<double>& x,
                       const std::vector<double>& y, double x_limit) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] >= x_limit) break;
    if (x[i + 1] <= x_limit) {
      area += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
      continue;
    }
    const double t = (x_limit - x[i]) / (x[i + 1] - x[i]);
    const double y_cut = y[i] + t * (y[i + 1] - y[i]);
    area += 0.5 * (y[i] + y_cut) * (x_limit - x[i]);
    break;
  }
  return area;
}

double aupro(const RegionAccumulator& acc, double fpr_limit) {
  if (!(fpr_limit > 0.0 && fpr_limit <= 1.0)) {
    throw DomainError("fpr_limit must lie in (0, 1], got " +
                      std::to_string(fpr_limit));
  }
  const ProCurve curve = pro_curve(acc);
  // Integrate over raw false-positive counts, which are exact, and divide
  // once at the end; a curve pinned at 1 then yields exactly 1. Grid order
  // is threshold-ascending, so walk it backwards.
  const std::vector<std::uint64_t> fp = suffix_sums(acc.neg_pixels());
  const std::vector<double> x(fp.rbegin(), fp.rend());
  const std::vector<double> pro(curve.pro.rbegin(), curve.pro.rend());
  const double limit =
      fpr_limit * static_cast<double>(acc.neg_pixels().total());
  return std::min(1.0, trapezoid_up_to(x, pro, limit) / limit);
}

}  // namespace streameval
