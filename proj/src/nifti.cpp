#include "voxmetric/nifti.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <span>
#include <string>

#if defined(VOXMETRIC_HAVE_ZLIB)
#include <zlib.h>
#endif

#include "voxmetric/error.hpp"

namespace voxmetric {
namespace {

namespace fs = std::filesystem;

// Field offsets in the 348-byte NIfTI-1 header.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffRegular = 38;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffDescrip = 148;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffSrowX = 280;
constexpr std::size_t kOffMagic = 344;

constexpr std::int16_t kDtUInt8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

constexpr std::string_view kUnitTag = "voxmetric unit=";

bool is_gzip_path(const fs::path& path) { return path.extension() == ".gz"; }

[[noreturn]] void malformed(const fs::path& path, const std::string& why) {
  throw Error(ErrorKind::MalformedFile, path.string() + ": " + why);
}

template <typename T>
T byteswap_value(T v) {
  std::array<std::byte, sizeof(T)> raw;
  std::memcpy(raw.data(), &v, sizeof(T));
  std::reverse(raw.begin(), raw.end());
  std::memcpy(&v, raw.data(), sizeof(T));
  return v;
}

class HeaderReader {
 public:
  HeaderReader(const std::vector<std::byte>& bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    T v;
    std::memcpy(&v, bytes_.data() + offset, sizeof(T));
    return swap_ ? byteswap_value(v) : v;
  }

 private:
  const std::vector<std::byte>& bytes_;
  bool swap_;
};

class HeaderWriter {
 public:
  HeaderWriter() : bytes_(kNiftiVoxOffset, std::byte{0}) {}

  template <typename T>
  void put(std::size_t offset, T v) {
    if constexpr (std::endian::native == std::endian::big) v = byteswap_value(v);
    std::memcpy(bytes_.data() + offset, &v, sizeof(T));
  }
  void put_text(std::size_t offset, std::string_view text) {
    std::memcpy(bytes_.data() + offset, text.data(), text.size());
  }
  const std::vector<std::byte>& bytes() const { return bytes_; }

 private:
  std::vector<std::byte> bytes_;
};

std::vector<std::byte> read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw Error(ErrorKind::MissingArtifact, path.string() + ": no such file");
  if (is_gzip_path(path)) {
#if defined(VOXMETRIC_HAVE_ZLIB)
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) throw Error(ErrorKind::MissingArtifact, path.string() + ": cannot open");
    std::vector<std::byte> out;
    std::array<char, 1 << 16> chunk;
    int got = 0;
    while ((got = gzread(gz, chunk.data(), static_cast<unsigned>(chunk.size()))) > 0) {
      const auto* begin = reinterpret_cast<const std::byte*>(chunk.data());
      out.insert(out.end(), begin, begin + got);
    }
    gzclose(gz);
    if (got < 0) malformed(path, "corrupt gzip stream");
    return out;
#else
    throw Error(ErrorKind::UnsupportedFeature, path.string() + ": built without gzip support");
#endif
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingArtifact, path.string() + ": cannot open");
  const auto size = static_cast<std::size_t>(fs::file_size(path));
  std::vector<std::byte> out(size);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) malformed(path, "short read");
  return out;
}

void write_file(const fs::path& path, const std::vector<std::byte>& header,
                std::span<const std::byte> payload) {
  if (is_gzip_path(path)) {
#if defined(VOXMETRIC_HAVE_ZLIB)
    gzFile gz = gzopen(path.string().c_str(), "wb6");
    if (!gz) throw Error(ErrorKind::WriteError, path.string() + ": cannot open for writing");
    bool ok = gzwrite(gz, header.data(), static_cast<unsigned>(header.size())) ==
              static_cast<int>(header.size());
    std::size_t done = 0;
    while (ok && done < payload.size()) {
      const std::size_t n = std::min<std::size_t>(payload.size() - done, 1u << 30);
      ok = gzwrite(gz, payload.data() + done, static_cast<unsigned>(n)) == static_cast<int>(n);
      done += n;
    }
    if (gzclose(gz) != Z_OK || !ok) throw Error(ErrorKind::WriteError, path.string() + ": write failed");
    return;
#else
    throw Error(ErrorKind::UnsupportedFeature, path.string() + ": built without gzip support");
#endif
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::WriteError, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::WriteError, path.string() + ": write failed");
}

std::string_view unit_tag(IntensityUnit unit) {
  switch (unit) {
    case IntensityUnit::HU: return "HU";
    case IntensityUnit::Normalized: return "normalized";
    case IntensityUnit::Display8Bit: return "display8";
  }
  return "HU";
}

IntensityUnit parse_unit(std::string_view descrip, ElementKind kind) {
  if (descrip.starts_with(kUnitTag)) {
    const auto tag = descrip.substr(kUnitTag.size());
    if (tag == "normalized") return IntensityUnit::Normalized;
    if (tag == "display8") return IntensityUnit::Display8Bit;
    if (tag == "HU" && kind != ElementKind::UInt8) return IntensityUnit::HU;
  }
  return kind == ElementKind::UInt8 ? IntensityUnit::Display8Bit : IntensityUnit::HU;
}

template <typename T>
std::vector<T> decode_payload(const std::byte* data, std::size_t count, bool swap) {
  std::vector<T> values(count);
  std::memcpy(values.data(), data, count * sizeof(T));
  if (swap && sizeof(T) > 1)
    for (auto& v : values) v = byteswap_value(v);
  return values;
}

}  // namespace

bool nifti_gzip_supported() noexcept {
#if defined(VOXMETRIC_HAVE_ZLIB)
  return true;
#else
  return false;
#endif
}

Volume load_nifti(const fs::path& path) {
  const std::vector<std::byte> file = read_file(path);
  if (file.size() < kNiftiHeaderSize) malformed(path, "file shorter than a NIfTI-1 header");

  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, file.data() + kOffSizeofHdr, 4);
  if constexpr (std::endian::native == std::endian::big) sizeof_hdr = byteswap_value(sizeof_hdr);
  bool file_is_little;
  if (sizeof_hdr == 348) {
    file_is_little = true;
  } else if (byteswap_value(sizeof_hdr) == 348) {
    file_is_little = false;
  } else {
    malformed(path, "sizeof_hdr is not 348");
  }
  const bool swap = file_is_little != (std::endian::native == std::endian::little);
  const HeaderReader h(file, swap);

  const auto* magic = reinterpret_cast<const char*>(file.data() + kOffMagic);
  const bool single_file = std::memcmp(magic, "n+1\0", 4) == 0;
  const bool pair_file = std::memcmp(magic, "ni1\0", 4) == 0;
  if (!single_file && !pair_file) malformed(path, "bad magic");

  const auto datatype = h.get<std::int16_t>(kOffDatatype);
  const auto bitpix = h.get<std::int16_t>(kOffBitpix);
  ElementKind kind;
  std::size_t element_size;
  switch (datatype) {
    case kDtUInt8: kind = ElementKind::UInt8; element_size = 1; break;
    case kDtInt16: kind = ElementKind::Int16; element_size = 2; break;
    case kDtFloat32: kind = ElementKind::Float32; element_size = 4; break;
    default:
      throw Error(ErrorKind::UnsupportedDatatype,
                  path.string() + ": datatype " + std::to_string(datatype));
  }
  if (bitpix != static_cast<std::int16_t>(element_size * 8))
    malformed(path, "bitpix does not match datatype");

  const auto ndim = h.get<std::int16_t>(kOffDim);
  if (ndim != 3)
    throw Error(ErrorKind::UnsupportedDimensionality,
                path.string() + ": dim[0] = " + std::to_string(ndim));
  std::array<std::size_t, 3> n{};
  std::array<double, 3> s{};
  for (int a = 0; a < 3; ++a) {
    const auto d = h.get<std::int16_t>(kOffDim + 2 * (a + 1));
    if (d < 1) malformed(path, "non-positive grid dimension");
    n[a] = static_cast<std::size_t>(d);
    const double p = std::abs(static_cast<double>(h.get<float>(kOffPixdim + 4 * (a + 1))));
    if (!(p > 0.0) || !std::isfinite(p)) malformed(path, "non-positive voxel spacing");
    s[a] = p;
  }
  const Geometry geometry({n[0], n[1], n[2]}, {s[0], s[1], s[2]});

  const float vox_offset = h.get<float>(kOffVoxOffset);
  if (!std::isfinite(vox_offset) || vox_offset < 0.0f || vox_offset != std::floor(vox_offset))
    malformed(path, "invalid vox_offset");
  auto offset = static_cast<std::size_t>(vox_offset);

  std::vector<std::byte> image_file;
  const std::vector<std::byte>* payload_source = &file;
  if (single_file) {
    if (offset < kNiftiVoxOffset) malformed(path, "vox_offset inside the header");
  } else {
    fs::path image_path = path;
    if (is_gzip_path(image_path)) image_path.replace_extension();
    image_path.replace_extension(".img");
    image_file = read_file(image_path);
    payload_source = &image_file;
  }

  const std::size_t count = geometry.voxel_count();
  const std::size_t bytes = count * element_size;
  if (payload_source->size() < offset || payload_source->size() - offset < bytes)
    malformed(path, "voxel payload truncated");
  const std::byte* data = payload_source->data() + offset;

  const char* descrip_raw = reinterpret_cast<const char*>(file.data() + kOffDescrip);
  const std::string descrip(descrip_raw, strnlen(descrip_raw, 80));
  const IntensityUnit unit = parse_unit(descrip, kind);

  switch (kind) {
    case ElementKind::UInt8:
      return Volume(geometry, decode_payload<std::uint8_t>(data, count, false), unit);
    case ElementKind::Int16:
      return Volume(geometry, decode_payload<std::int16_t>(data, count, swap), unit);
    case ElementKind::Float32:
      return Volume(geometry, decode_payload<float>(data, count, swap), unit);
  }
  malformed(path, "unreachable datatype");
}

void save_nifti(const Volume& volume, const fs::path& path) {
  const Dims& d = volume.geometry().dims();
  const Spacing& sp = volume.geometry().spacing();
  for (std::size_t n : {d.nx, d.ny, d.nz})
    if (n > 32767) throw Error(ErrorKind::WriteError, path.string() + ": grid too large for NIfTI-1");

  std::int16_t datatype = kDtUInt8;
  std::int16_t bitpix = 8;
  switch (volume.kind()) {
    case ElementKind::UInt8: break;
    case ElementKind::Int16: datatype = kDtInt16; bitpix = 16; break;
    case ElementKind::Float32: datatype = kDtFloat32; bitpix = 32; break;
  }

  HeaderWriter h;
  h.put<std::int32_t>(kOffSizeofHdr, 348);
  h.put<char>(kOffRegular, 'r');
  const std::array<std::int16_t, 8> dim{3, static_cast<std::int16_t>(d.nx),
                                        static_cast<std::int16_t>(d.ny),
                                        static_cast<std::int16_t>(d.nz), 1, 1, 1, 1};
  for (std::size_t i = 0; i < dim.size(); ++i) h.put(kOffDim + 2 * i, dim[i]);
  h.put(kOffDatatype, datatype);
  h.put(kOffBitpix, bitpix);
  const std::array<float, 8> pixdim{1.0f, static_cast<float>(sp.x), static_cast<float>(sp.y),
                                    static_cast<float>(sp.z), 0.0f, 0.0f, 0.0f, 0.0f};
  for (std::size_t i = 0; i < pixdim.size(); ++i) h.put(kOffPixdim + 4 * i, pixdim[i]);
  h.put(kOffVoxOffset, static_cast<float>(kNiftiVoxOffset));
  h.put(kOffSclSlope, 1.0f);
  h.put(kOffSclInter, 0.0f);
  h.put<char>(kOffXyztUnits, 2);  // millimetres
  std::string descrip(kUnitTag);
  descrip += unit_tag(volume.unit());
  h.put_text(kOffDescrip, descrip);
  // Axis-aligned scanner transform so viewers show the right voxel size.
  h.put<std::int16_t>(kOffSformCode, 1);
  for (int row = 0; row < 3; ++row)
    h.put(kOffSrowX + 16 * row + 4 * row, pixdim[row + 1]);
  h.put_text(kOffMagic, std::string_view("n+1\0", 4));

  std::vector<std::byte> payload = std::visit(
      [](const auto& values) {
        using T = typename std::decay_t<decltype(values)>::value_type;
        std::vector<std::byte> out(values.size() * sizeof(T));
        if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
          for (std::size_t i = 0; i < values.size(); ++i) {
            const T v = byteswap_value(values[i]);
            std::memcpy(out.data() + i * sizeof(T), &v, sizeof(T));
          }
        } else {
          std::memcpy(out.data(), values.data(), out.size());
        }
        return out;
      },
      volume.storage());
  write_file(path, h.bytes(), payload);
}

void save_mask_nifti(const BinaryMask& mask, const fs::path& path) {
  const auto bits = mask.bits();
  save_nifti(Volume(mask.geometry(), std::vector<std::uint8_t>(bits.begin(), bits.end()),
                    IntensityUnit::Display8Bit),
             path);
}

}  // namespace voxmetric
