#pragma once

// Hand-assembled NIfTI-1 files following the published header layout, used
// to check the reader independently of the library's writer.

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "voxmetric/error.hpp"

namespace voxmetric::oracle {

struct RawNifti {
  std::int32_t sizeof_hdr = 348;
  std::array<std::int16_t, 8> dim{3, 4, 4, 2, 1, 1, 1, 1};
  std::int16_t datatype = 4;
  std::int16_t bitpix = 16;
  std::array<float, 8> pixdim{1.0f, 1.171875f, 1.171875f, 5.0f, 0, 0, 0, 0};
  float vox_offset = 352.0f;
  std::string magic{"n+1\0", 4};
  bool big_endian = false;
  std::vector<std::uint8_t> payload;  // raw bytes, already in the file's byte order
  std::size_t truncate_to = 0;        // 0 = keep everything
};

template <typename T>
void put_raw(std::vector<std::uint8_t>& buf, std::size_t offset, T v, bool big_endian) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[offset + i] = bytes[big_endian ? sizeof(T) - 1 - i : i];  // host is little-endian
}

inline std::vector<std::uint8_t> assemble(const RawNifti& r) {
  std::vector<std::uint8_t> buf(352, 0);
  put_raw(buf, 0, r.sizeof_hdr, r.big_endian);
  for (std::size_t i = 0; i < 8; ++i) put_raw(buf, 40 + 2 * i, r.dim[i], r.big_endian);
  put_raw(buf, 70, r.datatype, r.big_endian);
  put_raw(buf, 72, r.bitpix, r.big_endian);
  for (std::size_t i = 0; i < 8; ++i) put_raw(buf, 76 + 4 * i, r.pixdim[i], r.big_endian);
  put_raw(buf, 108, r.vox_offset, r.big_endian);
  put_raw(buf, 112, 1.0f, r.big_endian);
  std::memcpy(buf.data() + 344, r.magic.data(), 4);
  buf.resize(static_cast<std::size_t>(r.vox_offset > 352 ? r.vox_offset : 352), 0);
  buf.insert(buf.end(), r.payload.begin(), r.payload.end());
  if (r.truncate_to) buf.resize(r.truncate_to);
  return buf;
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// int16 4x4x2 payload with value i at linear index i, little-endian.
inline std::vector<std::uint8_t> ramp_payload_i16(std::size_t count, bool big_endian = false) {
  std::vector<std::uint8_t> out(count * 2);
  for (std::size_t i = 0; i < count; ++i) put_raw(out, 2 * i, static_cast<std::int16_t>(i), big_endian);
  return out;
}

struct MalformedCase {
  std::string name;
  std::vector<std::uint8_t> bytes;
  ErrorKind expected;
};

/// Ten broken files, each with the error kind the reader must raise.
inline std::vector<MalformedCase> malformed_corpus() {
  auto base = [] {
    RawNifti r;
    r.payload = ramp_payload_i16(32);
    return r;
  };
  std::vector<MalformedCase> out;
  {
    RawNifti r = base();
    r.magic = std::string("XXXX");
    out.push_back({"bad_magic", assemble(r), ErrorKind::MalformedFile});
  }
  {
    std::vector<std::uint8_t> bytes = assemble(base());
    bytes.resize(200);
    out.push_back({"short_header", std::move(bytes), ErrorKind::MalformedFile});
  }
  {
    RawNifti r = base();
    r.sizeof_hdr = 540;
    out.push_back({"wrong_sizeof_hdr", assemble(r), ErrorKind::MalformedFile});
  }
  {
    RawNifti r = base();
    r.datatype = 64;  // float64
    r.bitpix = 64;
    out.push_back({"datatype_float64", assemble(r), ErrorKind::UnsupportedDatatype});
  }
  {
    RawNifti r = base();
    r.datatype = 512;  // uint16
    out.push_back({"datatype_uint16", assemble(r), ErrorKind::UnsupportedDatatype});
  }
  {
    RawNifti r = base();
    r.dim[0] = 4;
    out.push_back({"four_dimensional", assemble(r), ErrorKind::UnsupportedDimensionality});
  }
  {
    RawNifti r = base();
    r.dim[2] = 0;
    out.push_back({"zero_extent", assemble(r), ErrorKind::MalformedFile});
  }
  {
    RawNifti r = base();
    r.pixdim[3] = 0.0f;
    out.push_back({"zero_spacing", assemble(r), ErrorKind::MalformedFile});
  }
  {
    RawNifti r = base();
    r.truncate_to = 352 + 40;
    out.push_back({"truncated_payload", assemble(r), ErrorKind::MalformedFile});
  }
  {
    RawNifti r = base();
    r.bitpix = 8;
    out.push_back({"bitpix_mismatch", assemble(r), ErrorKind::MalformedFile});
  }
  return out;
}

}  // namespace voxmetric::oracle
