#pragma once

#include <filesystem>

#include "voxmetric/volume.hpp"

namespace voxmetric {

// NIfTI-1 subset.
//
// Reading accepts single-file ("n+1") and header/image pair ("ni1") datasets
// with datatype 2 (uint8), 4 (int16) or 16 (float32) and dim[0] == 3. Byte
// order is detected from sizeof_hdr. Spacing comes from pixdim[1..3];
// qform/sform orientation, scl_slope and scl_inter are read and ignored.
//
// Writing always produces a single-file, little-endian dataset: 348-byte
// header, 4 bytes of extension flags, voxels at offset 352.
//
// Paths ending in ".gz" are handled through zlib when the library was built
// with it (see nifti_gzip_supported()); otherwise they raise UnsupportedFeature.

/// The intensity unit is stored in the descrip field ("voxmetric unit=<tag>").
/// Files without the tag get HU for int16/float32 data and Display8Bit for uint8.
Volume load_nifti(const std::filesystem::path& path);

void save_nifti(const Volume& volume, const std::filesystem::path& path);

/// Writes a mask as a uint8 0/1 volume.
void save_mask_nifti(const BinaryMask& mask, const std::filesystem::path& path);

bool nifti_gzip_supported() noexcept;

inline constexpr std::size_t kNiftiHeaderSize = 348;
inline constexpr std::size_t kNiftiVoxOffset = 352;

}  // namespace voxmetric
