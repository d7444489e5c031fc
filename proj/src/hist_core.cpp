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

#include "streameval/hist_core.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <utility>

#include "streameval/errors.hpp"

namespace streameval {

namespace {

std::string FormatScore(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

void CheckFinite(double score) {
  if (!std::isfinite(score)) {
    throw DomainError("non-finite score: " + FormatScore(score));
  }
}

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::endian::native == std::endian::little ||
                std::endian::native == std::endian::big);
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
  }
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T GetLe(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
  }
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// BinSpec

BinSpec::BinSpec(double lo, double hi, std::size_t n_bins)
    : lo_(lo), hi_(hi), n_bins_(n_bins) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("bin range requires finite lo < hi, got [" +
                      FormatScore(lo) + ", " + FormatScore(hi) + "]");
  }
  if (n_bins < 2) {
    throw DomainError("bin count must be at least 2, got " +
                      std::to_string(n_bins));
  }
  if (n_bins > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("bin count does not fit the u32 record field: " +
                      std::to_string(n_bins));
  }
  // Very narrow ranges can collapse neighbouring edges in floating point.
  for (std::size_t k = 0; k < n_bins; ++k) {
    if (!(edge(k) < edge(k + 1))) {
      throw DomainError("bin edges are not strictly increasing for " +
                        ToString());
    }
  }
}

double BinSpec::edge(std::size_t k) const {
  if (k >= n_bins_) return hi_;
  return lo_ + static_cast<double>(k) * (hi_ - lo_) /
                   static_cast<double>(n_bins_);
}

std::string BinSpec::ToString() const {
  return "BinSpec(" + FormatScore(lo_) + ", " + FormatScore(hi_) + ", " +
         std::to_string(n_bins_) + ")";
}

std::size_t bin_index(const BinSpec& spec, double score) {
  CheckFinite(score);
  const std::size_t last = spec.n_bins() - 1;
  if (score <= spec.lo()) return 0;
  if (score >= spec.hi()) return last;
  const double pos = (score - spec.lo()) / (spec.hi() - spec.lo()) *
                     static_cast<double>(spec.n_bins());
  std::size_t k = pos >= static_cast<double>(last)
                      ? last
                      : static_cast<std::size_t>(pos);
  // The scaled guess can be off by one near an edge; settle it against the
  // edges themselves so bin membership agrees with edge().
  while (k > 0 && score < spec.edge(k)) --k;
  while (k < last && score >= spec.edge(k + 1)) ++k;
  return k;
}

bool is_clamped(const BinSpec& spec, double score) {
  return score < spec.lo() || score > spec.hi();
}

// ---------------------------------------------------------------------------
// Histogram

Histogram::Histogram(BinSpec spec)
    : spec_(spec), counts_(spec.n_bins(), 0) {}

Histogram::Histogram(BinSpec spec, std::vector<std::uint64_t> counts)
    : spec_(spec), counts_(std::move(counts)) {
  if (counts_.size() != spec_.n_bins()) {
    throw DimensionError("histogram has " + std::to_string(counts_.size()) +
                         " counts but " + spec_.ToString() + " needs " +
                         std::to_string(spec_.n_bins()));
  }
  for (std::uint64_t c : counts_) total_ += c;
}

void Histogram::add(double score) {
  const std::size_t k = bin_index(spec_, score);
  ++counts_[k];
  ++total_;
  if (is_clamped(spec_, score)) ++clamped_;
}

void Histogram::add(std::span<const float> scores) {
  for (float s : scores) CheckFinite(s);
  for (float s : scores) add(static_cast<double>(s));
}

void Histogram::add(std::span<const double> scores) {
  for (double s : scores) CheckFinite(s);
  for (double s : scores) add(s);
}

void Histogram::add_to_bin(std::size_t k, std::uint64_t count) {
  if (k >= counts_.size()) {
    throw DomainError("bin " + std::to_string(k) + " out of range for " +
                      spec_.ToString());
  }
  counts_[k] += count;
  total_ += count;
}

Histogram& Histogram::operator+=(const Histogram& other) {
  if (!(spec_ == other.spec_)) {
    throw IncompatibleSpecError("cannot merge histograms over " +
                                spec_.ToString() + " and " +
                                other.spec_.ToString());
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    counts_[k] += other.counts_[k];
  }
  total_ += other.total_;
  clamped_ += other.clamped_;
  return *this;
}

Histogram merge(const Histogram& a, const Histogram& b) {
  Histogram out = a;
  out += b;
  return out;
}

std::vector<std::uint64_t> suffix_sums(const Histogram& h) {
  const std::size_t n = h.size();
  std::vector<std::uint64_t> out(n + 1, 0);
  for (std::size_t k = n; k-- > 0;) out[k] = out[k + 1] + h[k];
  return out;
}

std::vector<std::uint8_t> serialize(const Histogram& h) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + 8 + 4 + 8 * h.size());
  PutLe<double>(out, h.spec().lo());
  PutLe<double>(out, h.spec().hi());
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(h.size()));
  for (std::uint64_t c : h.counts()) PutLe<std::uint64_t>(out, c);
  return out;
}

Histogram deserialize_histogram(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 8 + 8 + 4;
  if (bytes.size() < kHeader) {
    throw IoError("histogram record truncated: " +
                  std::to_string(bytes.size()) + " bytes");
  }
  const double lo = GetLe<double>(bytes, 0);
  const double hi = GetLe<double>(bytes, 8);
  const std::uint32_t n = GetLe<std::uint32_t>(bytes, 16);
  if (bytes.size() != kHeader + 8 * static_cast<std::size_t>(n)) {
    throw IoError("histogram record of " + std::to_string(bytes.size()) +
                  " bytes does not match n_bins=" + std::to_string(n));
  }
  std::vector<std::uint64_t> counts(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    counts[k] = GetLe<std::uint64_t>(bytes, kHeader + 8 * k);
  }
  return Histogram(BinSpec(lo, hi, n), std::move(counts));
}

// ---------------------------------------------------------------------------
// ScoreHistogramPair

ScoreHistogramPair::ScoreHistogramPair(Histogram pos, Histogram neg)
    : pos_(std::move(pos)), neg_(std::move(neg)) {
  if (!(pos_.spec() == neg_.spec())) {
    throw IncompatibleSpecError("pair halves disagree: " +
                                pos_.spec().ToString() + " vs " +
                                neg_.spec().ToString());
  }
}

namespace {

template <typename Score>
void CheckBatch(std::span<const Score> scores,
                std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("batch has " + std::to_string(scores.size()) +
                         " scores but " + std::to_string(labels.size()) +
                         " labels");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CheckFinite(static_cast<double>(scores[i]));
    if (labels[i] > 1) {
      throw DomainError("label must be 0 or 1, got " +
                        std::to_string(labels[i]) + " at index " +
                        std::to_string(i));
    }
  }
}

}  // namespace

void ScoreHistogramPair::accumulate(const SampleBatch& batch) {
  CheckBatch(batch.scores, batch.labels);
  for (std::size_t i = 0; i < batch.scores.size(); ++i) {
    (batch.labels[i] ? pos_ : neg_).add(static_cast<double>(batch.scores[i]));
  }
}

void ScoreHistogramPair::accumulate(std::span<const double> scores,
                                    std::span<const std::uint8_t> labels) {
  CheckBatch(scores, labels);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (labels[i] ? pos_ : neg_).add(scores[i]);
  }
}

void ScoreHistogramPair::add(double score, bool positive) {
  (positive ? pos_ : neg_).add(score);
}

ScoreHistogramPair& ScoreHistogramPair::operator+=(
    const ScoreHistogramPair& other) {
  pos_ += other.pos_;
  neg_ += other.neg_;
  return *this;
}

ScoreHistogramPair merge(const ScoreHistogramPair& a,
                         const ScoreHistogramPair& b) {
  ScoreHistogramPair out = a;
  out += b;
  return out;
}

}  // namespace streameval
