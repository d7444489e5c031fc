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

// Threshold grid and mergeable count histograms.
//
// A BinSpec fixes N+1 strictly increasing thresholds thr_k = lo + k*(hi-lo)/N.
// Scores fall into half-open bins [thr_k, thr_{k+1}); the last bin is closed
// on the right. Scores outside [lo, hi] clamp to the edge bins and are
// counted separately so a run can report how many samples were clamped.
//
// A Histogram stores exactly N 64-bit counters, whatever the number of samples
// fed into it. Histograms over the same BinSpec form a commutative monoid
// under merge(), which is what makes per-worker accumulation followed by a
// reduction produce bit-identical results.

#ifndef STREAMEVAL_HIST_CORE_HPP_
#define STREAMEVAL_HIST_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace streameval {

inline constexpr std::size_t kDefaultBins = 1024;

class BinSpec {
 public:
  // Throws DomainError unless lo < hi, both finite, and n_bins >= 2.
  BinSpec(double lo, double hi, std::size_t n_bins);

  // The default grid: [0, 1] with kDefaultBins bins.
  BinSpec() : BinSpec(0.0, 1.0, kDefaultBins) {}

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t n_bins() const { return n_bins_; }

  // thr_k for k in [0, N]. edge(N) == hi exactly.
  double edge(std::size_t k) const;

  std::string ToString() const;

  friend bool operator==(const BinSpec&, const BinSpec&) = default;

 private:
  double lo_;
  double hi_;
  std::size_t n_bins_;
};

// Index k with edge(k) <= score < edge(k+1); scores below lo map to 0 and
// scores at or above hi map to N-1. Throws DomainError for NaN or infinity.
std::size_t bin_index(const BinSpec& spec, double score);

// True when the score lies outside [lo, hi] and was moved to an edge bin.
bool is_clamped(const BinSpec& spec, double score);

class Histogram {
 public:
  explicit Histogram(BinSpec spec);
  Histogram(BinSpec spec, std::vector<std::uint64_t> counts);

  const BinSpec& spec() const { return spec_; }
  std::size_t size() const { return counts_.size(); }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t operator[](std::size_t k) const { return counts_[k]; }

  // Number of samples ever added.
  std::uint64_t total() const { return total_; }

  // Number of added samples that fell outside [lo, hi]. Not part of the
  // serialized record.
  std::uint64_t clamped() const { return clamped_; }

  // Adds one score. Throws DomainError for non-finite scores.
  void add(double score);
  void add(std::span<const float> scores);
  void add(std::span<const double> scores);

  // Adds `count` samples directly to bin k.
  void add_to_bin(std::size_t k, std::uint64_t count = 1);

  // In-place element-wise sum. Throws IncompatibleSpecError on mismatch.
  Histogram& operator+=(const Histogram& other);

  // Equal spec and equal counts; the clamped tally is diagnostic only.
  friend bool operator==(const Histogram& a, const Histogram& b) {
    return a.spec_ == b.spec_ && a.counts_ == b.counts_;
  }

 private:
  BinSpec spec_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t clamped_ = 0;
};

Histogram merge(const Histogram& a, const Histogram& b);

// out[k] = sum of counts[k..N-1]; out has N+1 entries with out[N] == 0, so
// out[k] is the number of samples with score >= thr_k.
std::vector<std::uint64_t> suffix_sums(const Histogram& h);

// Flat little-endian record: lo f64, hi f64, n_bins u32, counts n_bins x u64.
std::vector<std::uint8_t> serialize(const Histogram& h);
Histogram deserialize_histogram(std::span<const std::uint8_t> bytes);

// A batch of (score, label) samples. Labels must be 0 or 1.
struct SampleBatch {
  std::span<const float> scores;
  std::span<const std::uint8_t> labels;
};

// Positive and negative histograms over one shared grid.
class ScoreHistogramPair {
 public:
  explicit ScoreHistogramPair(BinSpec spec = BinSpec())
      : pos_(spec), neg_(spec) {}
  ScoreHistogramPair(Histogram pos, Histogram neg);

  const BinSpec& spec() const { return pos_.spec(); }
  const Histogram& pos() const { return pos_; }
  const Histogram& neg() const { return neg_; }

  std::uint64_t total() const { return pos_.total() + neg_.total(); }
  std::uint64_t clamped() const { return pos_.clamped() + neg_.clamped(); }

  // Routes each score into pos or neg by its label. Validates the whole
  // batch before touching any counter, so a rejected batch leaves the pair
  // unchanged.
  void accumulate(const SampleBatch& batch);
  void accumulate(std::span<const double> scores,
                  std::span<const std::uint8_t> labels);

  // Single sample.
  void add(double score, bool positive);

  ScoreHistogramPair& operator+=(const ScoreHistogramPair& other);

  friend bool operator==(const ScoreHistogramPair&,
                         const ScoreHistogramPair&) = default;

 private:
  Histogram pos_;
  Histogram neg_;
};

ScoreHistogramPair merge(const ScoreHistogramPair& a,
                         const ScoreHistogramPair& b);

}  // namespace streameval

#endif  // STREAMEVAL_HIST_CORE_HPP_
