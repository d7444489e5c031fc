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

#include "streameval/io.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "streameval/errors.hpp"

namespace streameval {

namespace fs = std::filesystem;

void OpenCounter::record(const fs::path& path) {
  total_.fetch_add(1);
  std::lock_guard<std::mutex> lock(mu_);
  ++per_path_[path.lexically_normal().string()];
}

std::uint64_t OpenCounter::count(const fs::path& path) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = per_path_.find(path.lexically_normal().string());
  return it == per_path_.end() ? 0 : it->second;
}

std::map<std::string, std::uint64_t> OpenCounter::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return per_path_;
}

namespace {

constexpr char kNpyMagic[] = "\x93NUMPY";
constexpr std::size_t kNpyMagicLen = 6;

std::string ReadAll(const fs::path& path, OpenCounter* counter,
                    std::size_t limit = 0) {
  std::ifstream in(path, std::ios::binary);
  if (counter) counter->record(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes;
  if (limit == 0) {
    bytes.assign(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());
  } else {
    bytes.resize(limit);
    in.read(bytes.data(), static_cast<std::streamsize>(limit));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

std::uint32_t LoadLe32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

std::uint32_t LoadBe32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

struct NpyHeader {
  Shape shape;
  std::size_t data_offset = 0;
};

// Value text following 'key': in a python dict literal.
std::string DictValue(const std::string& dict, const std::string& key,
                      const std::string& origin) {
  const std::string quoted = "'" + key + "'";
  std::size_t pos = dict.find(quoted);
  if (pos == std::string::npos) {
    throw IoError(origin + ": NPY header lacks " + quoted);
  }
  pos = dict.find(':', pos + quoted.size());
  if (pos == std::string::npos) {
    throw IoError(origin + ": NPY header malformed near " + quoted);
  }
  ++pos;
  while (pos < dict.size() && dict[pos] == ' ') ++pos;
  std::size_t end = pos;
  if (pos < dict.size() && (dict[pos] == '\'' || dict[pos] == '"')) {
    end = dict.find(dict[pos], pos + 1);
    if (end == std::string::npos) throw IoError(origin + ": unterminated string");
    return dict.substr(pos + 1, end - pos - 1);
  }
  if (pos < dict.size() && dict[pos] == '(') {
    end = dict.find(')', pos);
    if (end == std::string::npos) throw IoError(origin + ": unterminated tuple");
    return dict.substr(pos, end - pos + 1);
  }
  end = dict.find_first_of(",}", pos);
  return dict.substr(pos, end - pos);
}

NpyHeader ParseNpyHeader(std::string_view bytes, const std::string& origin) {
  if (bytes.size() < 10 ||
      std::memcmp(bytes.data(), kNpyMagic, kNpyMagicLen) != 0) {
    throw IoError(origin + ": not an NPY file");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9]))
                  << 8);
    prefix = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw IoError(origin + ": truncated NPY header");
    header_len = LoadLe32(bytes.data() + 8);
    prefix = 12;
  } else {
    throw IoError(origin + ": unsupported NPY version " +
                  std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) {
    throw IoError(origin + ": truncated NPY header");
  }
  const std::string dict(bytes.substr(prefix, header_len));

  const std::string descr = DictValue(dict, "descr", origin);
  if (descr != "<f4") {
    throw IoError(origin + ": expected dtype '<f4', got '" + descr + "'");
  }
  const std::string fortran = DictValue(dict, "fortran_order", origin);
  if (fortran.find("False") == std::string::npos) {
    throw IoError(origin + ": Fortran-ordered arrays are not supported");
  }
  const std::string shape_text = DictValue(dict, "shape", origin);
  std::vector<std::size_t> dims;
  std::size_t i = 0;
  while (i < shape_text.size()) {
    if (std::isdigit(static_cast<unsigned char>(shape_text[i]))) {
      std::size_t j = i;
      while (j < shape_text.size() &&
             std::isdigit(static_cast<unsigned char>(shape_text[j]))) {
        ++j;
      }
      dims.push_back(std::stoull(shape_text.substr(i, j - i)));
      i = j;
    } else {
      ++i;
    }
  }
  if (dims.size() != 2) {
    throw IoError(origin + ": expected a 2-D array, got shape " + shape_text);
  }
  return {{dims[0], dims[1]}, prefix + header_len};
}

std::string NpyHeaderText(const Shape& shape) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                     std::to_string(shape.rows) + ", " +
                     std::to_string(shape.cols) + "), }";
  // Pad with spaces so magic + length + dict + '\n' is a multiple of 64.
  const std::size_t unpadded = kNpyMagicLen + 2 + 2 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict += '\n';
  return dict;
}

Shape ParsePngShape(std::string_view bytes, const std::string& origin) {
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G',
                                            '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kSig, 8) != 0 ||
      std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw IoError(origin + ": not a PNG file");
  }
  return {LoadBe32(bytes.data() + 20), LoadBe32(bytes.data() + 16)};
}

}  // namespace

std::string encode_npy(const ScoreMap& map) {
  const std::string dict = NpyHeaderText(map.shape());
  std::string out(kNpyMagic, kNpyMagicLen);
  out += '\x01';
  out += '\x00';
  out += static_cast<char>(dict.size() & 0xff);
  out += static_cast<char>((dict.size() >> 8) & 0xff);
  out += dict;
  const std::size_t start = out.size();
  out.resize(start + map.size() * 4);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(map.data()[i]);
    for (int b = 0; b < 4; ++b) {
      out[start + 4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return out;
}

ScoreMap decode_npy(std::string_view bytes, const std::string& origin) {
  const NpyHeader header = ParseNpyHeader(bytes, origin);
  const std::size_t n = header.shape.size();
  if (bytes.size() != header.data_offset + 4 * n) {
    throw IoError(origin + ": payload holds " +
                  std::to_string(bytes.size() - header.data_offset) +
                  " bytes, shape " + header.shape.ToString() + " needs " +
                  std::to_string(4 * n));
  }
  std::vector<float> data(n);
  const char* p = bytes.data() + header.data_offset;
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = std::bit_cast<float>(LoadLe32(p + 4 * i));
  }
  return ScoreMap(header.shape, std::move(data));
}

ScoreMap read_npy(const fs::path& path, OpenCounter* counter) {
  return decode_npy(ReadAll(path, counter), path.string());
}

Shape read_npy_shape(const fs::path& path, OpenCounter* counter) {
  // Version 1.0 headers are capped at 64 KiB.
  return ParseNpyHeader(ReadAll(path, counter, 65536 + 12), path.string())
      .shape;
}

void write_npy(const fs::path& path, const ScoreMap& map) {
  write_text_file(path, encode_npy(map));
}

Mask read_png_mask(const fs::path& path, OpenCounter* counter) {
  const std::string bytes = ReadAll(path, counter);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  Mask mask(Shape{image.height, image.width}, 0);
  if (!png_image_finish_read(&image, nullptr, mask.data().data(), 0,
                             nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": " + message);
  }
  return mask;
}

Shape read_png_shape(const fs::path& path, OpenCounter* counter) {
  return ParsePngShape(ReadAll(path, counter, 24), path.string());
}

void write_png_mask(const fs::path& path, const Mask& mask) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.cols());
  image.height = static_cast<png_uint_32>(mask.rows());
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0,
                                 mask.data().data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
  std::string buffer(size, '\0');
  if (!png_image_write_to_memory(&image, buffer.data(), &size, 0,
                                 mask.data().data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
  buffer.resize(size);
  write_text_file(path, buffer);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw IoError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_text_file(const fs::path& path, OpenCounter* counter) {
  return ReadAll(path, counter);
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace streameval
