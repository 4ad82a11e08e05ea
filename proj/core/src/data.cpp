// Copyright 2026 The atpqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "atpqnn/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "atpqnn/error.hpp"
#include "atpqnn/random.hpp"

namespace atpqnn::data {
namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw Error(ErrorKind::kLength, path.string() + ": truncated header");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), 4);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

RawDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
  auto img = open_binary(images_path);
  auto lab = open_binary(labels_path);

  const std::uint32_t img_magic = read_be32(img, images_path);
  if (img_magic != kIdxImageMagic) {
    throw Error(ErrorKind::kFormat, images_path.string() + ": bad IDX image magic");
  }
  const std::uint32_t lab_magic = read_be32(lab, labels_path);
  if (lab_magic != kIdxLabelMagic) {
    throw Error(ErrorKind::kFormat, labels_path.string() + ": bad IDX label magic");
  }
  const std::uint32_t n_images = read_be32(img, images_path);
  const std::uint32_t rows = read_be32(img, images_path);
  const std::uint32_t cols = read_be32(img, images_path);
  const std::uint32_t n_labels = read_be32(lab, labels_path);
  if (n_images != n_labels) {
    throw Error(ErrorKind::kConsistency, "IDX image count " + std::to_string(n_images) +
                                             " differs from label count " +
                                             std::to_string(n_labels));
  }

  RawDataset raw;
  raw.rows = rows;
  raw.cols = cols;
  const std::size_t pixels = std::size_t{rows} * cols;
  raw.images.reserve(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    std::vector<std::uint8_t> buf(pixels);
    if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels))) {
      throw Error(ErrorKind::kLength, images_path.string() + ": truncated at image " +
                                          std::to_string(i));
    }
    raw.images.push_back(std::move(buf));
  }
  std::vector<std::uint8_t> labels(n_labels);
  if (n_labels > 0 &&
      !lab.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(n_labels))) {
    throw Error(ErrorKind::kLength, labels_path.string() + ": truncated label data");
  }
  raw.labels.assign(labels.begin(), labels.end());
  return raw;
}

void write_idx(const RawDataset& raw, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw Error(ErrorKind::kIo, "cannot write IDX files");
  write_be32(img, kIdxImageMagic);
  write_be32(img, static_cast<std::uint32_t>(raw.size()));
  write_be32(img, static_cast<std::uint32_t>(raw.rows));
  write_be32(img, static_cast<std::uint32_t>(raw.cols));
  for (const auto& im : raw.images) {
    img.write(reinterpret_cast<const char*>(im.data()), static_cast<std::streamsize>(im.size()));
  }
  write_be32(lab, kIdxLabelMagic);
  write_be32(lab, static_cast<std::uint32_t>(raw.size()));
  for (int l : raw.labels) lab.put(static_cast<char>(l));
}

RawDataset load_gray_csv(const std::filesystem::path& path, std::size_t side) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  RawDataset raw;
  raw.rows = side;
  raw.cols = side;
  const std::size_t want = side * side;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    std::vector<int> vals;
    std::size_t pos = 0;
    while (pos <= row.size()) {
      const std::size_t comma = std::min(row.find(',', pos), row.size());
      const std::string_view field = trim(row.substr(pos, comma - pos));
      int v = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) +
                                            ": not an integer: '" + std::string(field) + "'");
      }
      vals.push_back(v);
      pos = comma + 1;
    }
    if (vals.size() != want + 1) {
      throw Error(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) +
                                          ": ragged row with " + std::to_string(vals.size() - 1) +
                                          " pixels, expected " + std::to_string(want));
    }
    std::vector<std::uint8_t> px(want);
    for (std::size_t i = 0; i < want; ++i) {
      const int v = vals[i + 1];
      if (v < 0 || v > 255) {
        throw Error(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) +
                                            ": pixel value " + std::to_string(v) +
                                            " outside 0..255");
      }
      px[i] = static_cast<std::uint8_t>(v);
    }
    raw.labels.push_back(vals[0]);
    raw.images.push_back(std::move(px));
  }
  return raw;
}

void write_gray_csv(const RawDataset& raw, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (std::size_t n = 0; n < raw.size(); ++n) {
    out << raw.labels[n];
    for (std::uint8_t v : raw.images[n]) out << ',' << static_cast<int>(v);
    out << '\n';
  }
}

encoders::ImageGrid downscale(std::span<const std::uint8_t> source, std::size_t source_side,
                              std::size_t s) {
  if (s == 0 || s > source_side) {
    throw Error(ErrorKind::kInvalidArgument, "cannot downscale side " +
                                                 std::to_string(source_side) + " to " +
                                                 std::to_string(s));
  }
  if (source.size() != source_side * source_side) {
    throw Error(ErrorKind::kShapeMismatch, "source image is not side x side");
  }
  // round(k * side / s), half up, in integer arithmetic.
  std::vector<std::size_t> edge(s + 1);
  for (std::size_t k = 0; k <= s; ++k) edge[k] = (2 * k * source_side + s) / (2 * s);
  std::vector<double> out(s * s);
  for (std::size_t bi = 0; bi < s; ++bi) {
    for (std::size_t bj = 0; bj < s; ++bj) {
      double sum = 0.0;
      for (std::size_t i = edge[bi]; i < edge[bi + 1]; ++i) {
        for (std::size_t j = edge[bj]; j < edge[bj + 1]; ++j) sum += source[i * source_side + j];
      }
      const auto cells = static_cast<double>((edge[bi + 1] - edge[bi]) * (edge[bj + 1] - edge[bj]));
      out[bi * s + bj] = std::clamp(sum / cells / 255.0, 0.0, 1.0);
    }
  }
  return encoders::ImageGrid(s, std::move(out));
}

Split filter_pair(const RawDataset& raw, int c0, int c1, const SplitSpec& split,
                  std::size_t grid_side) {
  if (split.n_train == 0 || split.n_test == 0) {
    throw Error(ErrorKind::kInvalidArgument, "n_train and n_test must be >= 1");
  }
  if (c0 == c1) throw Error(ErrorKind::kInvalidArgument, "class pair needs two classes");
  if (raw.rows != raw.cols) {
    throw Error(ErrorKind::kFormat, "source images are not square");
  }

  std::vector<std::size_t> of0;
  std::vector<std::size_t> of1;
  for (std::size_t n = 0; n < raw.size(); ++n) {
    if (raw.labels[n] == c0) of0.push_back(n);
    if (raw.labels[n] == c1) of1.push_back(n);
  }

  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  if (split.balanced) {
    const std::size_t tr0 = split.n_train / 2;
    const std::size_t te0 = split.n_test / 2;
    const std::size_t tr1 = split.n_train - tr0;
    const std::size_t te1 = split.n_test - te0;
    const auto take = [&](std::vector<std::size_t>& pool, int cls, std::size_t ntr,
                          std::size_t nte, std::uint64_t stream) {
      if (pool.size() < ntr + nte) {
        throw Error(ErrorKind::kCapacity, "class " + std::to_string(cls) + " has " +
                                              std::to_string(pool.size()) + " samples, need " +
                                              std::to_string(ntr + nte));
      }
      Rng rng(derive_seed(split.seed, {stream}));
      rng.shuffle(pool.begin(), pool.end());
      train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + static_cast<long>(ntr));
      test_idx.insert(test_idx.end(), pool.begin() + static_cast<long>(ntr),
                      pool.begin() + static_cast<long>(ntr + nte));
    };
    take(of0, c0, tr0, te0, 10);
    take(of1, c1, tr1, te1, 11);
  } else {
    std::vector<std::size_t> pool = of0;
    pool.insert(pool.end(), of1.begin(), of1.end());
    std::sort(pool.begin(), pool.end());
    if (pool.size() < split.n_train + split.n_test) {
      throw Error(ErrorKind::kCapacity, "class pair has " + std::to_string(pool.size()) +
                                            " samples, need " +
                                            std::to_string(split.n_train + split.n_test));
    }
    Rng rng(derive_seed(split.seed, {12}));
    rng.shuffle(pool.begin(), pool.end());
    train_idx.assign(pool.begin(), pool.begin() + static_cast<long>(split.n_train));
    test_idx.assign(pool.begin() + static_cast<long>(split.n_train),
                    pool.begin() + static_cast<long>(split.n_train + split.n_test));
  }
  Rng order_rng(derive_seed(split.seed, {13}));
  order_rng.shuffle(train_idx.begin(), train_idx.end());
  order_rng.shuffle(test_idx.begin(), test_idx.end());

  const auto build = [&](const std::vector<std::size_t>& idx) {
    PairDataset set;
    set.class_pair = {c0, c1};
    for (std::size_t n : idx) {
      set.images.push_back(downscale(raw.images[n], raw.rows, grid_side));
      set.labels.push_back(raw.labels[n] == c0 ? -1 : 1);
      set.source_index.push_back(n);
    }
    return set;
  };
  return Split{build(train_idx), build(test_idx)};
}

}  // namespace atpqnn::data
