#include "tdsm/fieldio.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <openssl/evp.h>

#include "tdsm/error.hpp"

namespace tdsm {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 * 3 + 8 * 2;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) {
    out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
  }
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
  }
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  std::uint64_t u64() { return take(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  double f64() { return std::bit_cast<double>(take(8)); }
  std::string_view raw(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      fail(ErrorKind::format, "tdis: truncated payload");
    }
  }
  std::uint64_t take(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(b)]))
           << (8 * b);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

bool checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t& out) { return !__builtin_mul_overflow(a, b, &out); }

double metadata_number(const std::map<std::string, std::string>& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) {
    fail(ErrorKind::format, "tdis: metadata is missing '" + key + "'");
  }
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    fail(ErrorKind::format, "tdis: metadata '" + key + "' is not a number");
  }
  return v;
}

}  // namespace

std::string encode_tdis(const ScatteredDataSet& data) {
  const auto& acq = data.acquisition;
  const auto& t = data.values;
  require(t.receivers() == acq.receivers.size() && t.sources() == acq.sources.size() && t.times() == acq.grid.size(),
          "tdis: tensor shape does not match the acquisition");

  auto meta = data.metadata;
  meta["T"] = format_double(acq.grid.terminal_time());
  meta["signal.omega"] = format_double(acq.signal.omega);
  meta["signal.sigma"] = format_double(acq.signal.sigma);
  meta["signal.t0"] = format_double(acq.signal.t0);
  meta["signal.causal_truncation"] = acq.signal.causal_truncation ? "true" : "false";

  std::string out;
  out.reserve(kHeaderBytes + 32 * (t.receivers() + t.sources()) + 8 * t.size() + 256);
  out.append("TDIS");
  put_u32(out, kTdisVersion);
  put_u32(out, static_cast<std::uint32_t>(acq.dimension()));
  put_u64(out, t.receivers());
  put_u64(out, static_cast<std::uint64_t>(acq.grid.steps()));
  put_u64(out, t.sources());
  put_f64(out, acq.grid.dt());
  put_f64(out, acq.medium.c);
  for (const auto* surface : {&acq.receivers, &acq.sources}) {
    for (std::size_t n = 0; n < surface->size(); ++n) {
      const auto& p = surface->points[n];
      put_f64(out, p.x());
      put_f64(out, p.y());
      put_f64(out, p.z());
      put_f64(out, surface->weights[n]);
    }
  }
  for (std::size_t i = 0; i < t.receivers(); ++i) {
    for (std::size_t k = 0; k < t.times(); ++k) {
      for (std::size_t j = 0; j < t.sources(); ++j) {
        put_f64(out, t.at(i, k, j));
      }
    }
  }
  std::string text;
  for (const auto& [key, value] : meta) {
    require(key.find_first_of("=\n") == std::string::npos && value.find('\n') == std::string::npos,
            "tdis: metadata keys/values must be single-line");
    text += key + "=" + value + "\n";
  }
  put_u64(out, text.size());
  out += text;
  return out;
}

ScatteredDataSet decode_tdis(std::string_view bytes) {
  Reader in(bytes);
  if (bytes.size() < 4 || bytes.substr(0, 4) != "TDIS") {
    fail(ErrorKind::format, "tdis: bad magic");
  }
  (void)in.raw(4);
  const std::uint32_t version = in.u32();
  if (version != kTdisVersion) {
    fail(ErrorKind::format, "tdis: version mismatch (file " + std::to_string(version) + ", expected " +
                                std::to_string(kTdisVersion) + ")");
  }
  const std::uint32_t dimension = in.u32();
  const std::uint64_t nm = in.u64();
  const std::uint64_t steps = in.u64();
  const std::uint64_t ni = in.u64();
  const double dt = in.f64();
  const double c = in.f64();
  if (dimension != 2 && dimension != 3) {
    fail(ErrorKind::format, "tdis: unsupported dimension " + std::to_string(dimension));
  }

  std::uint64_t values = 0;
  std::uint64_t sensor_bytes = 0;
  std::uint64_t value_bytes = 0;
  if (steps == UINT64_MAX || !checked_mul(nm, steps + 1, values) || !checked_mul(values, ni, values) ||
      !checked_mul(nm + ni, 32, sensor_bytes) || nm + ni < nm || !checked_mul(values, 8, value_bytes) ||
      sensor_bytes + value_bytes < sensor_bytes) {
    fail(ErrorKind::format, "tdis: dimension overflow");
  }
  if (nm == 0 || ni == 0 || steps == 0 || steps > INT32_MAX) {
    fail(ErrorKind::format, "tdis: invalid tensor dimensions");
  }
  if (sensor_bytes + value_bytes > in.remaining()) {
    fail(ErrorKind::format, "tdis: truncated payload");
  }
  if (!(dt > 0.0) || !std::isfinite(dt) || !(c > 0.0) || !std::isfinite(c)) {
    fail(ErrorKind::format, "tdis: invalid dt or sound speed");
  }

  ScatteredDataSet out;
  auto& acq = out.acquisition;
  acq.medium.c = c;
  for (auto [surface, count] : {std::pair{&acq.receivers, nm}, std::pair{&acq.sources, ni}}) {
    surface->dimension = static_cast<int>(dimension);
    for (std::uint64_t n = 0; n < count; ++n) {
      const double x = in.f64();
      const double y = in.f64();
      const double z = in.f64();
      surface->points.emplace_back(x, y, z);
      surface->weights.push_back(in.f64());
    }
  }
  out.values = Tensor3(nm, steps + 1, ni);
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t k = 0; k <= steps; ++k) {
      for (std::size_t j = 0; j < ni; ++j) {
        out.values.at(i, k, j) = in.f64();
      }
    }
  }
  const std::uint64_t meta_len = in.u64();
  if (meta_len > in.remaining()) {
    fail(ErrorKind::format, "tdis: truncated metadata");
  }
  const std::string_view text = in.raw(meta_len);
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view line = text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::format, "tdis: malformed metadata line");
    }
    out.metadata.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    if (end == std::string_view::npos) {
      break;
    }
    start = end + 1;
  }
  if (in.remaining() != 0) {
    fail(ErrorKind::format, "tdis: trailing bytes after metadata");
  }

  const double terminal = metadata_number(out.metadata, "T");
  acq.grid = TimeGrid(terminal, static_cast<int>(steps));
  if (std::abs(acq.grid.dt() - dt) > 1e-12 * dt) {
    fail(ErrorKind::format, "tdis: header dt disagrees with T / N_t");
  }
  acq.signal.omega = metadata_number(out.metadata, "signal.omega");
  acq.signal.sigma = metadata_number(out.metadata, "signal.sigma");
  acq.signal.t0 = metadata_number(out.metadata, "signal.t0");
  const auto causal = out.metadata.find("signal.causal_truncation");
  acq.signal.causal_truncation = causal == out.metadata.end() || causal->second != "false";
  return out;
}

void atomic_write(const std::filesystem::path& path, std::string_view bytes) {
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fail(ErrorKind::io, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::io, "cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::io, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    fail(ErrorKind::io, "read from '" + path.string() + "' failed");
  }
  return ss.str();
}

void write_tdis(const ScatteredDataSet& data, const std::filesystem::path& path) {
  atomic_write(path, encode_tdis(data));
}

ScatteredDataSet read_tdis(const std::filesystem::path& path) { return decode_tdis(read_file(path)); }

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::io, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int n = 0; n < len; ++n) {
    out.push_back(kHex[md[n] >> 4]);
    out.push_back(kHex[md[n] & 0xf]);
  }
  return out;
}

std::string encode_field(const IndicatorField& field, const FieldWriteInfo& info) {
  require(field.values.size() == field.grid.size(), "field: value count differs from probe count");
  const int dim = field.grid.dimension();
  std::string out;
  const auto cols = field.metadata.find("columns");
  if (cols != field.metadata.end()) {
    out += cols->second;
  } else {
    out += dim == 3 ? "z1,z2,z3" : "z1,z2";
  }
  out += ",value\n";
  for (std::size_t idx = 0; idx < field.grid.size(); ++idx) {
    const Vec3& p = field.grid.point(idx);
    for (int a = 0; a < dim; ++a) {
      out += format_double(p[a]);
      out += ',';
    }
    out += format_double(field.values[idx]);
    out += '\n';
  }
  auto meta = field.metadata;
  meta.erase("columns");
  meta.try_emplace("indicator", std::string(indicator_name(field.kind)));
  if (!meta.contains("argmax") && !field.values.empty()) {
    const Vec3& p = field.grid.point(field.argmax());
    std::string at = format_double(p[0]);
    for (int a = 1; a < dim; ++a) at += "," + format_double(p[a]);
    meta["argmax"] = at;
  }
  if (!info.data_hash.empty()) {
    meta["data-hash"] = info.data_hash;
  }
  if (!info.config_echo.empty()) {
    meta["config"] = info.config_echo;
  }
  // indicator and argmax lead, the rest follow in key order
  for (const char* key : {"indicator", "argmax"}) {
    const auto it = meta.find(key);
    if (it != meta.end()) {
      out += "# " + it->first + ": " + it->second + "\n";
      meta.erase(it);
    }
  }
  for (const auto& [key, value] : meta) {
    out += "# " + key + ": " + value + "\n";
  }
  return out;
}

void write_field(const IndicatorField& field, const std::filesystem::path& path, const FieldWriteInfo& info) {
  atomic_write(path, encode_field(field, info));
}

FieldTable parse_field(std::string_view text) {
  FieldTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line.starts_with("# ")) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) {
        fail(ErrorKind::format, "field: malformed comment line");
      }
      table.comments[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    if (header) {
      table.columns = std::move(cells);
      header = false;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      fail(ErrorKind::format, "field: row width differs from the header");
    }
    std::vector<double> row;
    for (const auto& cell : cells) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        fail(ErrorKind::format, "field: value '" + cell + "' is not a finite number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (header) {
    fail(ErrorKind::format, "field: missing header row");
  }
  return table;
}

FieldTable read_field(const std::filesystem::path& path) { return parse_field(read_file(path)); }

IndicatorField slice_field(const IndicatorField& field, int axis, double coord) {
  require(field.grid.dimension() == 3, "slice: field must be 3D");
  require(axis >= 0 && axis <= 2, "slice: axis must be 0, 1 or 2");
  const auto& axes = field.grid.axes();
  const auto& ax = axes[static_cast<std::size_t>(axis)];
  const double f = (coord - ax.lo) / ax.spacing();
  const int plane = std::clamp(static_cast<int>(std::lround(f)), 0, ax.count - 1);

  std::vector<int> keep;
  for (int a = 0; a < 3; ++a) {
    if (a != axis) {
      keep.push_back(a);
    }
  }
  IndicatorField out;
  out.grid = SamplingGrid({axes[static_cast<std::size_t>(keep[0])], axes[static_cast<std::size_t>(keep[1])]});
  out.kind = field.kind;
  out.values.resize(out.grid.size());
  for (std::size_t idx = 0; idx < out.grid.size(); ++idx) {
    const auto m2 = out.grid.unflatten(idx);
    std::array<int, 3> m3{0, 0, 0};
    m3[static_cast<std::size_t>(axis)] = plane;
    m3[static_cast<std::size_t>(keep[0])] = m2[0];
    m3[static_cast<std::size_t>(keep[1])] = m2[1];
    out.values[idx] = field.values[field.grid.flatten(m3)];
  }
  out.metadata["indicator"] = std::string(indicator_name(field.kind));
  out.metadata["columns"] = "z" + std::to_string(keep[0] + 1) + ",z" + std::to_string(keep[1] + 1);
  out.metadata["slice"] = "z" + std::to_string(axis + 1) + "=" + format_double(ax.at(plane));
  const std::size_t best = out.argmax();
  const Vec3& p = out.grid.point(best);
  out.metadata["argmax"] = format_double(p.x()) + "," + format_double(p.y());
  out.metadata["max"] = format_double(out.max_value());
  out.metadata["min"] = format_double(out.min_value());
  return out;
}

}  // namespace tdsm
