#include "tdsm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "tdsm/error.hpp"
#include "tdsm/fieldio.hpp"

namespace tdsm {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::config, msg); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

json parse_scalar(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  if (s == "true") return true;
  if (s == "false") return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.find_first_of(".eE") == std::string::npos) {
    long long iv = 0;
    const auto r = std::from_chars(first, last, iv);
    if (r.ec == std::errc() && r.ptr == last) {
      return iv;
    }
  }
  double dv = 0.0;
  const auto r = std::from_chars(first, last, dv);
  if (!s.empty() && r.ec == std::errc() && r.ptr == last) {
    return dv;
  }
  return s;
}

json parse_value(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
    json arr = json::array();
    const std::string inner = trim(std::string_view(s).substr(1, s.size() - 2));
    if (!inner.empty()) {
      for (const auto& item : split(inner, ',')) {
        arr.push_back(parse_scalar(item));
      }
    }
    return arr;
  }
  if (s.find(',') != std::string::npos && !(s.front() == '"')) {
    json arr = json::array();
    for (const auto& item : split(s, ',')) {
      arr.push_back(parse_scalar(item));
    }
    return arr;
  }
  return parse_scalar(s);
}

json* descend(json& root, const std::vector<std::string>& path, std::size_t line_no) {
  json* node = &root;
  for (const auto& part : path) {
    if (part.empty()) {
      config_error("config line " + std::to_string(line_no) + ": empty name component");
    }
    if (!node->is_object()) {
      config_error("config line " + std::to_string(line_no) + ": '" + part + "' nests under a non-section value");
    }
    node = &(*node)[part];
    if (node->is_null()) {
      *node = json::object();
    }
  }
  return node;
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

// Typed access with field-path diagnostics; consumed keys are tracked to reject unknown ones.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_null() && !node_->is_object()) {
      config_error(path_ + ": expected a section");
    }
  }

  [[nodiscard]] bool present() const { return node_ && !node_->is_null(); }
  [[nodiscard]] const std::string& path() const { return path_; }

  [[nodiscard]] const json* raw(const std::string& key) {
    used_.insert(key);
    if (!present() || !node_->contains(key)) {
      return nullptr;
    }
    return &node_->at(key);
  }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number()) config_error(join(path_, key) + ": expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) config_error(join(path_, key) + ": must be finite");
    return d;
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (v->is_number_integer()) return v->get<long long>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    config_error(join(path_, key) + ": expected an integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_boolean()) config_error(join(path_, key) + ": expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) config_error(join(path_, key) + ": expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array()) config_error(join(path_, key) + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) config_error(join(path_, key) + ": expected a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section child(const std::string& key) {
    used_.insert(key);
    const json* v = present() && node_->contains(key) ? &node_->at(key) : nullptr;
    return Section(v, join(path_, key));
  }

  void reject_unknown() const {
    if (!present()) return;
    for (const auto& [key, value] : node_->items()) {
      if (!used_.contains(key)) {
        config_error(join(path_, key) + ": unknown key");
      }
    }
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace

json parse_config_text(std::string_view text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      return json::parse(body);
    } catch (const json::parse_error& e) {
      config_error(std::string("config: invalid JSON: ") + e.what());
    }
  }
  json root = json::object();
  json* section = &root;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') {
      continue;
    }
    const auto hash = s.find(" #");
    if (hash != std::string::npos) {
      s = trim(std::string_view(s).substr(0, hash));
    }
    if (s.front() == '[') {
      if (s.back() != ']') {
        config_error("config line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = descend(root, split(std::string_view(s).substr(1, s.size() - 2), '.'), line_no);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      config_error("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto path = split(std::string_view(s).substr(0, eq), '.');
    const std::string key = path.back();
    path.pop_back();
    json* target = descend(*section, path, line_no);
    if (key.empty()) {
      config_error("config line " + std::to_string(line_no) + ": empty key");
    }
    (*target)[key] = parse_value(s.substr(eq + 1));
  }
  return root;
}

json load_config_file(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

double parse_angle(const json& value, const std::string& field) {
  if (value.is_number()) {
    return value.get<double>();
  }
  if (!value.is_string()) {
    config_error(field + ": expected an angle");
  }
  std::string s;
  for (char ch : value.get<std::string>()) {
    if (ch != ' ' && ch != '*') s.push_back(ch);
  }
  const auto p = s.find("pi");
  if (p == std::string::npos) {
    config_error(field + ": cannot parse angle '" + value.get<std::string>() + "'");
  }
  auto number = [&](const std::string& t, double fallback) {
    if (t.empty()) return fallback;
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
      config_error(field + ": cannot parse angle '" + value.get<std::string>() + "'");
    }
    return v;
  };
  const double coef = number(s.substr(0, p), 1.0);
  std::string rest = s.substr(p + 2);
  double denom = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') {
      config_error(field + ": cannot parse angle '" + value.get<std::string>() + "'");
    }
    denom = number(rest.substr(1), 0.0);
    if (denom == 0.0) config_error(field + ": zero denominator");
  }
  return coef * kPi / denom;
}

Acquisition RunConfig::acquisition() const {
  Acquisition acq;
  acq.sources = sensors;
  acq.receivers = sensors;
  acq.grid = time;
  acq.signal = signal;
  acq.medium = medium;
  return acq;
}

std::vector<BoundaryCurve> RunConfig::boundaries() const {
  std::vector<BoundaryCurve> out;
  for (const auto& s : scatterers) {
    out.push_back(make_boundary(s.shape, s.center.head<2>(), s.scale, bie.nodes_per_curve));
  }
  return out;
}

std::vector<PointScatterer> RunConfig::point_scatterers() const {
  std::vector<PointScatterer> out;
  for (const auto& s : scatterers) {
    out.push_back({s.center, s.strength, 0.002 * s.scale});
  }
  return out;
}

RunConfig resolve_config(const json& raw) {
  if (!raw.is_object()) {
    config_error("config: top level must be a section map");
  }
  RunConfig cfg;
  Section root(&raw, "");
  json eff = json::object();

  {
    auto sec = root.child("signal");
    cfg.signal.omega = sec.number("omega", 4.0);
    cfg.signal.sigma = sec.number("sigma", 1.6);
    cfg.signal.t0 = sec.number("t0", 3.0);
    cfg.signal.causal_truncation = sec.boolean("causal_truncation", true);
    sec.reject_unknown();
    if (!(cfg.signal.omega > 0.0)) config_error("signal.omega: must be > 0");
    if (!(cfg.signal.sigma > 0.0)) config_error("signal.sigma: must be > 0");
    eff["signal"] = {{"omega", cfg.signal.omega},
                     {"sigma", cfg.signal.sigma},
                     {"t0", cfg.signal.t0},
                     {"causal_truncation", cfg.signal.causal_truncation}};
  }
  {
    auto sec = root.child("medium");
    cfg.medium.c = sec.number("c", 1.0);
    sec.reject_unknown();
    if (!(cfg.medium.c > 0.0)) config_error("medium.c: must be > 0");
    eff["medium"] = {{"c", cfg.medium.c}};
  }

  auto rec = root.child("reconstruct");
  const std::string ind = rec.string("indicator", "i1");
  try {
    cfg.indicator = parse_indicator(ind);
  } catch (const Error& e) {
    config_error(std::string("reconstruct.indicator: ") + e.what());
  }
  cfg.out = rec.string("out", "field.csv");
  rec.reject_unknown();
  eff["reconstruct"] = {{"indicator", ind}, {"out", cfg.out}};

  auto geo = root.child("geometry");
  auto sens = geo.child("sensors");
  if (!sens.present()) {
    config_error("geometry.sensors: missing required section");
  }
  const std::string layout = sens.string("layout", "circle");
  if (layout != "circle" && layout != "sphere") {
    config_error("geometry.sensors.layout: expected 'circle' or 'sphere'");
  }

  auto fwd = root.child("forward");
  cfg.model = fwd.string("model", "point_model");
  if (cfg.model != "point_model" && cfg.model != "bie_2d") {
    config_error("forward.model: expected 'point_model' or 'bie_2d'");
  }
  cfg.dimension = static_cast<int>(fwd.integer("dimension", layout == "sphere" ? 3 : 2));
  if (cfg.dimension != 2 && cfg.dimension != 3) config_error("forward.dimension: must be 2 or 3");
  if (layout == "sphere" && cfg.dimension != 3) config_error("forward.dimension: sphere layouts are 3D");
  if (cfg.model == "bie_2d" && cfg.dimension != 2) config_error("forward.model: bie_2d is 2D only");
  cfg.noise.level = fwd.number("noise", 0.0);
  if (!(cfg.noise.level >= 0.0)) config_error("forward.noise: must be >= 0");
  const long long seed = fwd.integer("seed", 0);
  if (seed < 0) config_error("forward.seed: must be >= 0");
  cfg.noise.seed = static_cast<std::uint64_t>(seed);
  fwd.reject_unknown();
  eff["forward"] = {{"model", cfg.model}, {"dimension", cfg.dimension}, {"noise", cfg.noise.level}, {"seed", seed}};

  {
    const long long count = sens.integer("count", layout == "sphere" ? 50 : 20);
    const double radius = sens.number("radius", 4.0);
    if (count < 1 || count > 100000) config_error("geometry.sensors.count: out of range");
    if (!(radius > 0.0)) config_error("geometry.sensors.radius: must be > 0");
    json s = {{"layout", layout}, {"count", count}, {"radius", radius}};
    if (layout == "circle") {
      const json* start = sens.raw("aperture_start");
      const json* span = sens.raw("aperture");
      const double a0 = start ? parse_angle(*start, "geometry.sensors.aperture_start") : 0.0;
      const double a1 = span ? parse_angle(*span, "geometry.sensors.aperture") : 2.0 * kPi;
      if (!(a1 > 0.0 && a1 <= 2.0 * kPi + 1e-12)) config_error("geometry.sensors.aperture: must lie in (0, 2pi]");
      try {
        cfg.sensors = make_circle_sensors(static_cast<int>(count), radius, a0, std::min(a1, 2.0 * kPi));
      } catch (const Error& e) {
        config_error(std::string("geometry.sensors: ") + e.what());
      }
      s["aperture_start"] = a0;
      s["aperture"] = std::min(a1, 2.0 * kPi);
    } else {
      if (count < 2) config_error("geometry.sensors.count: sphere layouts need >= 2 points");
      cfg.sensors = make_fibonacci_sphere_sensors(static_cast<int>(count), radius);
    }
    cfg.sensors.dimension = cfg.dimension;
    sens.reject_unknown();
    eff["geometry"]["sensors"] = s;
  }

  {
    auto g = geo.child("grid");
    const std::vector<double> dflt_bounds =
        cfg.dimension == 3 ? std::vector<double>{-2, 2, -2, 2, -2, 2} : std::vector<double>{-2.6, 2.6, -2.6, 2.6};
    const std::vector<double> dflt_counts =
        cfg.dimension == 3 ? std::vector<double>{21, 21, 21} : std::vector<double>{21, 21};
    const auto bounds = g.numbers("bounds", dflt_bounds);
    const auto counts_d = g.numbers("counts", dflt_counts);
    g.reject_unknown();
    if (bounds.size() != 2 * static_cast<std::size_t>(cfg.dimension)) {
      config_error("geometry.grid.bounds: expected " + std::to_string(2 * cfg.dimension) + " numbers");
    }
    if (counts_d.size() != static_cast<std::size_t>(cfg.dimension)) {
      config_error("geometry.grid.counts: expected " + std::to_string(cfg.dimension) + " integers");
    }
    std::vector<int> counts;
    for (double c : counts_d) {
      if (c < 2 || c > 10000 || std::floor(c) != c) config_error("geometry.grid.counts: integers >= 2 expected");
      counts.push_back(static_cast<int>(c));
    }
    try {
      cfg.grid = make_sampling_grid(bounds, counts);
    } catch (const Error& e) {
      config_error(std::string("geometry.grid: ") + e.what());
    }
    eff["geometry"]["grid"] = {{"bounds", bounds}, {"counts", counts}};
  }

  {
    const json* list = geo.raw("scatterers");
    json out = json::array();
    std::vector<std::pair<std::string, const json*>> items;
    if (list && list->is_array()) {
      for (std::size_t n = 0; n < list->size(); ++n) items.emplace_back(std::to_string(n), &list->at(n));
    } else if (list && list->is_object()) {
      for (const auto& [key, value] : list->items()) items.emplace_back(key, &value);
      std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        return a.first.size() != b.first.size() ? a.first.size() < b.first.size() : a.first < b.first;
      });
    } else if (list) {
      config_error("geometry.scatterers: expected a list or numbered sections");
    }
    for (const auto& [key, node] : items) {
      Section sc(node, "geometry.scatterers." + key);
      ScattererSpec s;
      const std::string shape = sc.string("shape", "");
      if (shape.empty()) config_error(sc.path() + ".shape: required");
      try {
        s.shape = parse_shape(shape);
      } catch (const Error& e) {
        config_error(sc.path() + ".shape: " + e.what());
      }
      const auto center = sc.numbers("center", std::vector<double>(static_cast<std::size_t>(cfg.dimension), 0.0));
      if (center.size() != 2 && center.size() != 3) config_error(sc.path() + ".center: expected 2 or 3 numbers");
      if (cfg.dimension == 2 && center.size() == 3 && center[2] != 0.0) {
        config_error(sc.path() + ".center: 2D runs need z = 0");
      }
      s.center = Vec3(center[0], center[1], center.size() == 3 ? center[2] : 0.0);
      s.scale = sc.number("scale", 1.0);
      s.strength = sc.number("strength", 1.0);
      sc.reject_unknown();
      if (!(s.scale > 0.0)) config_error(sc.path() + ".scale: must be > 0");
      if (cfg.model == "point_model" && s.shape != Shape::point) {
        config_error(sc.path() + ".shape: point_model supports shape 'point' only");
      }
      std::vector<double> c{s.center.x(), s.center.y()};
      if (cfg.dimension == 3) c.push_back(s.center.z());
      out.push_back({{"shape", std::string(shape_name(s.shape))}, {"center", c}, {"scale", s.scale},
                     {"strength", s.strength}});
      cfg.scatterers.push_back(s);
    }
    eff["geometry"]["scatterers"] = out;
  }
  geo.reject_unknown();

  {
    auto t = root.child("time");
    const double dflt_T = cfg.indicator == IndicatorKind::i3 ? 15.0 : 25.0;
    const double T = t.number("T", dflt_T);
    const long long nt = t.integer("Nt", 128);
    t.reject_unknown();
    if (!(T > 0.0)) config_error("time.T: must be > 0");
    if (nt < 1 || nt > 1000000) config_error("time.Nt: must be a positive integer");
    cfg.time = TimeGrid(T, static_cast<int>(nt));
    eff["time"] = {{"T", T}, {"Nt", nt}};
  }

  {
    auto b = root.child("bie");
    cfg.bie.nodes_per_curve = static_cast<int>(b.integer("nodes_per_curve", 128));
    cfg.bie.coupling = b.number("coupling", 1.0);
    cfg.spectral.threshold = b.number("freq_threshold", 1e-3);
    cfg.spectral.padding_factor = b.number("padding_factor", 2.0);
    cfg.spectral.damping = b.number("damping", 6.0);
    b.reject_unknown();
    try {
      cfg.bie.validate();
      cfg.spectral.validate();
    } catch (const Error& e) {
      config_error(std::string("bie: ") + e.what());
    }
    eff["bie"] = {{"nodes_per_curve", cfg.bie.nodes_per_curve},
                  {"coupling", cfg.bie.coupling},
                  {"freq_threshold", cfg.spectral.threshold},
                  {"padding_factor", cfg.spectral.padding_factor},
                  {"damping", cfg.spectral.damping}};
  }
  root.reject_unknown();
  cfg.effective = std::move(eff);
  return cfg;
}

std::string config_echo(const RunConfig& config) { return config.effective.dump(); }

}  // namespace tdsm
