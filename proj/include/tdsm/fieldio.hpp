#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tdsm/forward.hpp"
#include "tdsm/indicator.hpp"

namespace tdsm {

inline constexpr std::uint32_t kTdisVersion = 1;

/// Binary container for a ScatteredDataSet, little-endian:
///   "TDIS" u32 version u32 dimension u64 N_m u64 N_t u64 N_i f64 dt f64 c
///   N_m receivers then N_i sources as (x, y, z, weight) f64
///   N_m * (N_t + 1) * N_i f64 values, i-major, then k, then j
///   u64 byte length + sorted "key=value\n" metadata lines
/// The signal parameters travel in the metadata (signal.omega, ...).
[[nodiscard]] std::string encode_tdis(const ScatteredDataSet& data);
[[nodiscard]] ScatteredDataSet decode_tdis(std::string_view bytes);

void write_tdis(const ScatteredDataSet& data, const std::filesystem::path& path);
[[nodiscard]] ScatteredDataSet read_tdis(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

struct FieldWriteInfo {
  std::string data_hash;    ///< "sha256:<hex>" of the source .tdis, optional
  std::string config_echo;  ///< single-line JSON, optional
};

/// CSV: header z1,z2[,z3],value then one row per probe (%.17g), followed by
/// "# key: value" lines (indicator, argmax, data-hash, config, ...).
[[nodiscard]] std::string encode_field(const IndicatorField& field, const FieldWriteInfo& info = {});
void write_field(const IndicatorField& field, const std::filesystem::path& path, const FieldWriteInfo& info = {});

struct FieldTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> comments;
};

[[nodiscard]] FieldTable parse_field(std::string_view text);
[[nodiscard]] FieldTable read_field(const std::filesystem::path& path);

/// 2D field on the grid plane nearest to `coord` along `axis` (0, 1, 2) of a 3D field.
[[nodiscard]] IndicatorField slice_field(const IndicatorField& field, int axis, double coord);

}  // namespace tdsm
