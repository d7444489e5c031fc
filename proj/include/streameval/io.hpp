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

// File formats used by the evaluation harness: NPY v1.0 float32 score maps,
// 8-bit grayscale PNG masks and small RFC-4180 CSV tables.

#ifndef STREAMEVAL_IO_HPP_
#define STREAMEVAL_IO_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "streameval/image.hpp"

namespace streameval {

// Counts file opens per path. Readers take an optional pointer to one so a
// caller can check how many times each input was touched.
class OpenCounter {
 public:
  void record(const std::filesystem::path& path);
  std::uint64_t total() const { return total_.load(); }
  std::uint64_t count(const std::filesystem::path& path) const;
  std::map<std::string, std::uint64_t> snapshot() const;

 private:
  std::atomic<std::uint64_t> total_{0};
  mutable std::mutex mu_;
  std::map<std::string, std::uint64_t> per_path_;
};

// Reads a 2-D little-endian float32 C-order array. Throws IoError on
// anything else.
ScoreMap read_npy(const std::filesystem::path& path,
                  OpenCounter* counter = nullptr);

// Shape only; reads just the header.
Shape read_npy_shape(const std::filesystem::path& path,
                     OpenCounter* counter = nullptr);

// Writes NPY format version 1.0 with descr '<f4'.
void write_npy(const std::filesystem::path& path, const ScoreMap& map);

// Serialised NPY bytes for a score map; write_npy writes exactly these.
std::string encode_npy(const ScoreMap& map);
ScoreMap decode_npy(std::string_view bytes, const std::string& origin);

// Reads any PNG and reduces it to one 8-bit channel.
Mask read_png_mask(const std::filesystem::path& path,
                   OpenCounter* counter = nullptr);
Shape read_png_shape(const std::filesystem::path& path,
                     OpenCounter* counter = nullptr);

// Writes an 8-bit grayscale PNG.
void write_png_mask(const std::filesystem::path& path, const Mask& mask);

// Minimal RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path,
                           OpenCounter* counter = nullptr);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace streameval

#endif  // STREAMEVAL_IO_HPP_
