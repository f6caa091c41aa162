#pragma once

#include <filesystem>
#include <string>

#include "kp5/field.hpp"
#include "kp5/rational.hpp"

namespace kp5 {

/// KP5FLD file: 8-byte magic "KP5FLD\0\1", a 4-byte little-endian length, a
/// UTF-8 JSON header {nx, ny, lx, ly, mode, time, p, normalization}, then
/// nx*ny little-endian float64 values with x fastest.
struct Snapshot {
  Field field;
  double time = 0.0;
  Rational p{2};
};

inline constexpr const char* kNormalization = "unitary";

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace kp5
