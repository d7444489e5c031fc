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

#include "streameval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "streameval/errors.hpp"
#include "streameval/io.hpp"

namespace streameval {

namespace fs = std::filesystem;

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

namespace {

constexpr double kClassOffset = 0.3;
constexpr double kNoiseSigma = 0.25;
constexpr double kJitter = 0.1;

std::string ImageId(std::size_t i, std::size_t n) {
  const std::size_t width =
      std::max<std::size_t>(3, std::to_string(n > 0 ? n - 1 : 0).size());
  std::string id = std::to_string(i);
  if (id.size() < width) id.insert(0, width - id.size(), '0');
  return id;
}

void PaintShape(Mask& mask, SplitMix64& rng) {
  const double rows = static_cast<double>(mask.rows());
  const double cols = static_cast<double>(mask.cols());
  const double cy = rng.uniform(0.0, rows);
  const double cx = rng.uniform(0.0, cols);
  const double ry = std::max(1.0, rng.uniform(0.05, 0.2) * rows);
  const double rx = std::max(1.0, rng.uniform(0.05, 0.2) * cols);
  const bool ellipse = rng.uniform() < 0.5;
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    for (std::size_t c = 0; c < mask.cols(); ++c) {
      const double dy = (static_cast<double>(r) + 0.5 - cy) / ry;
      const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
      const bool inside = ellipse ? dx * dx + dy * dy <= 1.0
                                  : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
      if (inside) mask(r, c) = 255;
    }
  }
  // The centre pixel is always covered.
  mask(std::min(mask.rows() - 1, static_cast<std::size_t>(cy)),
       std::min(mask.cols() - 1, static_cast<std::size_t>(cx))) = 255;
}

}  // namespace

std::vector<SyntheticImage> generate_category(std::uint64_t seed,
                                              std::size_t category_index,
                                              std::size_t n_images,
                                              Shape shape,
                                              const AnomalyProfile& profile) {
  if (shape.rows < 8 || shape.cols < 8) {
    throw DomainError("synthetic images must be at least 8x8, got " +
                      shape.ToString());
  }
  const double sep = std::clamp(profile.separation, 0.0, 1.0);
  SplitMix64 rng(seed * 0x9e3779b97f4a7c15ULL + category_index + 1);
  std::vector<SyntheticImage> images;
  images.reserve(n_images);
  for (std::size_t i = 0; i < n_images; ++i) {
    SyntheticImage img;
    img.id = ImageId(i, n_images);
    img.label = i == 0   ? 0
                : i == 1 ? 1
                         : (rng.uniform() < profile.anomaly_fraction ? 1 : 0);
    img.mask = Mask(shape, 0);
    if (img.label == 1) {
      const int shapes =
          1 + static_cast<int>(rng.below(
                  static_cast<std::uint64_t>(std::max(1, profile.max_shapes))));
      for (int s = 0; s < shapes; ++s) PaintShape(img.mask, rng);
    }
    img.scores = ScoreMap(shape, 0.0f);
    for (std::size_t p = 0; p < shape.size(); ++p) {
      const bool fg = img.mask.data()[p] != 0;
      const double centre = 0.5 + (fg ? kClassOffset : -kClassOffset) * sep;
      const double raw = centre + (1.0 - sep) * kNoiseSigma * rng.normal() +
                         rng.uniform(-kJitter, kJitter);
      img.scores.data()[p] = static_cast<float>(std::clamp(raw, 0.0, 1.0));
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::string synthetic_category_name(std::size_t c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cat_%03zu", c);
  return buf;
}

void gen_synthetic(const fs::path& out_dir, const SyntheticSpec& spec) {
  if (spec.shape.rows < 8 || spec.shape.cols < 8) {
    throw DomainError("synthetic images must be at least 8x8, got " +
                      spec.shape.ToString());
  }
  if (spec.separations.empty()) {
    throw UsageError("at least one separation is required");
  }
  if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
    if (!spec.force) {
      throw UsageError("output directory is not empty: " + out_dir.string() +
                       " (use --force to overwrite)");
    }
    fs::remove_all(out_dir);
  }
  fs::create_directories(out_dir);

  for (std::size_t c = 0; c < spec.n_categories; ++c) {
    AnomalyProfile profile = spec.profile;
    profile.separation = spec.separations[c % spec.separations.size()];
    const std::vector<SyntheticImage> images =
        generate_category(spec.seed, c, spec.n_images, spec.shape, profile);

    const fs::path dir = out_dir / synthetic_category_name(c);
    fs::create_directories(dir / "scores");
    fs::create_directories(dir / "masks");
    std::string labels = "image_id,label\r\n";
    for (const SyntheticImage& img : images) {
      write_npy(dir / "scores" / (img.id + ".npy"), img.scores);
      if (img.label == 1) {
        write_png_mask(dir / "masks" / (img.id + ".png"), img.mask);
      }
      labels += img.id + "," + std::to_string(img.label) + "\r\n";
    }
    write_text_file(dir / "labels.csv", labels);
  }
}

}  // namespace streameval
