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

// Region-level per-region-overlap (PRO) accumulation and its FPR-limited
// area.
//
// Ground-truth masks are split into connected components. Each component
// keeps its own score histogram, and background pixels share one histogram.
// At grid threshold thr_k, PRO_k is the mean over components of the fraction
// of the component's pixels scoring >= thr_k, and FPR_k is the fraction of
// background pixels scoring >= thr_k. aupro() integrates PRO over FPR up to
// a limit and divides by that limit.

#ifndef STREAMEVAL_REGION_PRO_HPP_
#define STREAMEVAL_REGION_PRO_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streameval/hist_core.hpp"
#include "streameval/image.hpp"

namespace streameval {

inline constexpr double kDefaultFprLimit = 0.3;
inline constexpr int kDefaultConnectivity = 8;

struct MaskComponents {
  // 0 is background, 1..R are region ids in row-major first-pixel order.
  Grid<std::int32_t> labels;
  // region_sizes[r-1] is the pixel count of region r.
  std::vector<std::uint64_t> region_sizes;

  std::size_t region_count() const { return region_sizes.size(); }
};

// Two-pass union-find labeling. connectivity must be 4 or 8; anything else
// throws DomainError.
MaskComponents label_components(const Mask& mask,
                                int connectivity = kDefaultConnectivity);

class RegionAccumulator {
 public:
  explicit RegionAccumulator(BinSpec spec = BinSpec());

  const BinSpec& spec() const { return spec_; }
  const std::vector<Histogram>& per_region() const { return per_region_; }
  const Histogram& neg_pixels() const { return neg_pixels_; }
  std::size_t region_count() const { return per_region_.size(); }

  // Routes foreground pixels into fresh per-region histograms (appended in
  // region-id order) and background pixels into neg_pixels. Throws
  // DimensionError when the shapes differ and DomainError on non-finite
  // scores; in both cases the accumulator is left unchanged.
  void accumulate(const ScoreMap& scores, const MaskComponents& comps);

  // Concatenates region lists and merges background histograms.
  RegionAccumulator& operator+=(const RegionAccumulator& other);

  // Live counters held: N per region plus N for the background.
  std::size_t counter_count() const;

  std::uint64_t clamped() const;

 private:
  BinSpec spec_;
  std::vector<Histogram> per_region_;
  Histogram neg_pixels_;
};

// Per-threshold PRO and FPR, one entry per grid threshold thr_0..thr_N.
struct ProCurve {
  std::vector<double> fpr;
  std::vector<double> pro;
};

ProCurve pro_curve(const RegionAccumulator& acc);

// Normalised area under PRO(FPR) on [0, fpr_limit]. Throws
// UndefinedMetricError when there are no regions or no background pixels and
// DomainError when fpr_limit is outside (0, 1].
double aupro(const RegionAccumulator& acc,
             double fpr_limit = kDefaultFprLimit);

// Trapezoidal area of y(x) over [0, x_limit], x ascending, with the segment
// that straddles x_limit cut at a linearly interpolated point.
double trapezoid_up_to(const std::vector<double>& x,
                       const std::vector<double>& y, double x_limit);

}  // namespace streameval

#endif  // STREAMEVAL_REGION_PRO_HPP_
