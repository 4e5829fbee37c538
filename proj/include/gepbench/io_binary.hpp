#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "gepbench/matrix.hpp"

namespace gepbench {

// GEPB1 binary matrix format (all integers little-endian):
//   magic   5 bytes  "GEPB1"
//   dtype   1 byte   0x01 = IEEE-754 binary32 little-endian
//   n_rows  u32
//   n_cols  u32
//   payload n_rows * n_cols * 4 bytes, row-major binary32
//   crc     u32, CRC-32 (IEEE, reflected polynomial 0xEDB88320) over
//           everything before it (header + payload)
//
// Values are stored as binary32 (round-to-nearest-even from the in-memory
// doubles) and widen back to double on read.

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_matrix(const Matrix& m);
Matrix decode_matrix(std::span<const std::uint8_t> bytes);

void write_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path);

} // namespace gepbench
