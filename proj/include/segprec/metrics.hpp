#pragma once

// Dice overlap on binary masks built from label volumes.
//
// Volume container (".segv"), all integers little-endian:
//   bytes 0..7   magic "SEGV0001"
//   bytes 8..11  uint32 header length L
//   next L bytes UTF-8 JSON object:
//                  {"dims": [X, Y, Z], "dtype": "uint8", "labels": {"1": "name", ...}}
//                "labels" is optional and purely descriptive.
//   payload      X*Y*Z bytes, one uint8 label per voxel, row-major
//                (voxel (i, j, k) at offset (i*Y + j)*Z + k).
// Nothing may follow the payload.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "segprec/error.hpp"

namespace segprec {

using Dims = std::array<std::size_t, 3>;

inline std::size_t voxel_count(const Dims& dims) { return dims[0] * dims[1] * dims[2]; }

struct LabelVolume {
  Dims dims{1, 1, 1};
  std::vector<std::uint8_t> voxels;
  std::map<int, std::string> label_names;

  LabelVolume() : voxels(1, 0) {}
  LabelVolume(Dims d, std::vector<std::uint8_t> v, std::map<int, std::string> names = {})
      : dims(d), voxels(std::move(v)), label_names(std::move(names)) {
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
      throw Error(ErrorKind::DimMismatch, "volume dims must be positive");
    }
    if (voxels.size() != voxel_count(dims)) {
      throw Error(ErrorKind::DimMismatch, "voxel count " + std::to_string(voxels.size()) +
                                              " does not match dims product " +
                                              std::to_string(voxel_count(dims)));
    }
  }
};

struct BinaryMask {
  Dims dims{1, 1, 1};
  std::vector<bool> voxels;

  BinaryMask() : voxels(1, false) {}
  BinaryMask(Dims d, std::vector<bool> v) : dims(d), voxels(std::move(v)) {
    if (voxels.size() != voxel_count(dims)) {
      throw Error(ErrorKind::DimMismatch, "mask voxel count does not match dims");
    }
  }

  std::size_t count() const { return static_cast<std::size_t>(std::count(voxels.begin(), voxels.end(), true)); }
};

/// Union of the given labels as one foreground region.
inline BinaryMask merge_labels(const LabelVolume& volume, const std::set<int>& labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyLabelSet, "label set is empty");
  if (labels.count(0) != 0) throw Error(ErrorKind::BackgroundInLabelSet, "label 0 is background");
  std::array<bool, 256> wanted{};
  for (int l : labels) {
    if (l > 0 && l < 256) wanted[static_cast<std::size_t>(l)] = true;
  }
  std::vector<bool> mask(volume.voxels.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = wanted[volume.voxels[i]];
  return BinaryMask(volume.dims, std::move(mask));
}

/// Dice coefficient in percent: 100 * 2|A n B| / (|A| + |B|).
inline double dice(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.dims != gt.dims) throw Error(ErrorKind::DimMismatch, "masks have different dims");
  std::size_t a = 0, b = 0, both = 0;
  for (std::size_t i = 0; i < pred.voxels.size(); ++i) {
    const bool p = pred.voxels[i];
    const bool g = gt.voxels[i];
    a += p;
    b += g;
    both += p && g;
  }
  if (a + b == 0) throw Error(ErrorKind::UndefinedDice, "both masks are empty");
  return 100.0 * static_cast<double>(2 * both) / static_cast<double>(a + b);
}

namespace detail {
inline constexpr char kVolumeMagic[8] = {'S', 'E', 'G', 'V', '0', '0', '0', '1'};
}

inline void write_volume(std::ostream& out, const LabelVolume& volume) {
  nlohmann::json header;
  header["dims"] = {volume.dims[0], volume.dims[1], volume.dims[2]};
  header["dtype"] = "uint8";
  if (!volume.label_names.empty()) {
    nlohmann::json names = nlohmann::json::object();
    for (const auto& [label, name] : volume.label_names) names[std::to_string(label)] = name;
    header["labels"] = names;
  }
  const std::string text = header.dump();
  const auto length = static_cast<std::uint32_t>(text.size());
  const unsigned char len_bytes[4] = {
      static_cast<unsigned char>(length & 0xFF), static_cast<unsigned char>((length >> 8) & 0xFF),
      static_cast<unsigned char>((length >> 16) & 0xFF), static_cast<unsigned char>((length >> 24) & 0xFF)};
  out.write(detail::kVolumeMagic, sizeof(detail::kVolumeMagic));
  out.write(reinterpret_cast<const char*>(len_bytes), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(volume.voxels.data()), static_cast<std::streamsize>(volume.voxels.size()));
  if (!out) throw Error(ErrorKind::Io, "failed to write volume");
}

inline LabelVolume read_volume(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, detail::kVolumeMagic)) {
    throw Error(ErrorKind::ParseError, "volume: bad magic (expected SEGV0001)");
  }
  unsigned char len_bytes[4];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 4)) throw Error(ErrorKind::ParseError, "volume: truncated header length");
  const std::uint32_t length = std::uint32_t{len_bytes[0]} | (std::uint32_t{len_bytes[1]} << 8) |
                               (std::uint32_t{len_bytes[2]} << 16) | (std::uint32_t{len_bytes[3]} << 24);
  std::string text(length, '\0');
  if (!in.read(text.data(), length)) throw Error(ErrorKind::ParseError, "volume: truncated JSON header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("volume: invalid JSON header: ") + e.what());
  }
  if (!header.contains("dims") || !header["dims"].is_array() || header["dims"].size() != 3) {
    throw Error(ErrorKind::ParseError, "volume: header needs dims [X, Y, Z]");
  }
  if (header.value("dtype", std::string("uint8")) != "uint8") {
    throw Error(ErrorKind::ParseError, "volume: only dtype uint8 is supported");
  }
  Dims dims{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& d = header["dims"][i];
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
      throw Error(ErrorKind::ParseError, "volume: dims must be positive integers");
    }
    dims[i] = d.get<std::size_t>();
  }
  std::map<int, std::string> names;
  if (header.contains("labels")) {
    for (const auto& [key, value] : header["labels"].items()) {
      try {
        names[std::stoi(key)] = value.is_string() ? value.get<std::string>() : value.dump();
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "volume: label keys must be integers");
      }
    }
  }

  std::vector<std::uint8_t> voxels(voxel_count(dims));
  if (!in.read(reinterpret_cast<char*>(voxels.data()), static_cast<std::streamsize>(voxels.size()))) {
    throw Error(ErrorKind::ParseError, "volume: payload shorter than dims product");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::ParseError, "volume: trailing bytes after payload");
  }
  return LabelVolume(dims, std::move(voxels), std::move(names));
}

inline LabelVolume read_volume_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open volume '" + path + "'");
  return read_volume(in);
}

inline void write_volume_file(const std::string& path, const LabelVolume& volume) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot create volume '" + path + "'");
  write_volume(out, volume);
}

}  // namespace segprec
