#pragma once

#include <filesystem>

#include "quasifree/covariance.hpp"

namespace quasifree {

/// CSV with header `x,y,re,im` and 1-based site labels. Only the upper
/// triangle is written; on reading, missing entries are zero and each listed
/// (x, y) also fixes (y, x) by Hermiticity.
void write_covariance_csv(const std::filesystem::path& path, const Covariance& gamma);
Covariance read_covariance_csv(const std::filesystem::path& path);

/// Binary dump: "QLCV1", little-endian u32 L, then L*L complex64 (re, im as
/// float32) in row-major order.
void write_covariance_binary(const std::filesystem::path& path, const Covariance& gamma);
Covariance read_covariance_binary(const std::filesystem::path& path);

/// Dispatches on the leading magic bytes.
Covariance read_covariance(const std::filesystem::path& path);

}  // namespace quasifree
