#include "tdsm/commands.hpp"

#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "tdsm/fieldio.hpp"
#include "tdsm/geometry.hpp"

namespace tdsm {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string point_text(const Vec3& p, int dim) {
  return "(" + fmt(p.x()) + ", " + fmt(p.y()) + (dim == 3 ? ", " + fmt(p.z()) : std::string()) + ")";
}

SeparationReport separation_for(const RunConfig& cfg) {
  std::vector<BoundaryCurve> curves;
  std::vector<Vec3> centers;
  double diameter = 0.0;
  if (cfg.model == "bie_2d") {
    curves = cfg.boundaries();
  } else {
    for (const auto& s : cfg.point_scatterers()) {
      centers.push_back(s.center);
      diameter = std::max(diameter, s.diameter);
    }
  }
  return check_separation(cfg.grid, cfg.sensors, curves, centers, diameter);
}

void print_separation(const SeparationReport& rep, std::ostream& out) {
  out << "separation: dist(grid, sensors) = " << fmt(rep.grid_to_surface)
      << ", max scatterer diameter = " << fmt(rep.max_diameter) << ", separated = " << (rep.separated ? "yes" : "no")
      << ", contained = " << (rep.contained ? "yes" : "no") << ", disjoint = " << (rep.disjoint ? "yes" : "no")
      << "\n";
  for (const auto& w : rep.warnings) {
    out << "warning: " << w << "\n";
  }
}

json base_config(int dimension, double noise, std::uint64_t seed) {
  json cfg;
  cfg["signal"] = {{"omega", 4.0}, {"sigma", 1.6}, {"t0", 3.0}};
  cfg["medium"] = {{"c", 1.0}};
  if (dimension == 2) {
    cfg["geometry"]["sensors"] = {{"layout", "circle"}, {"count", 20}, {"radius", 4.0}};
    cfg["geometry"]["grid"] = {{"bounds", {-2.6, 2.6, -2.6, 2.6}}, {"counts", {21, 21}}};
  } else {
    cfg["geometry"]["sensors"] = {{"layout", "sphere"}, {"count", 50}, {"radius", 4.0}};
    cfg["geometry"]["grid"] = {{"bounds", {-2, 2, -2, 2, -2, 2}}, {"counts", {21, 21, 21}}};
  }
  cfg["forward"] = {{"model", "point_model"}, {"dimension", dimension}, {"noise", noise}, {"seed", seed}};
  return cfg;
}

json scatterer(const std::string& shape, std::vector<double> center, double scale = 1.0) {
  return {{"shape", shape}, {"center", std::move(center)}, {"scale", scale}, {"strength", 1.0}};
}

// The 2D examples use T = 25 for I1 / I2 and T = 15 for I3.
void add_2d_pair(std::vector<ReproCase>& out, const std::string& stem, json cfg) {
  cfg["time"] = {{"T", 25.0}, {"Nt", 128}};
  out.push_back({stem + "_T25", cfg, {IndicatorKind::i1, IndicatorKind::i2}, {}});
  cfg["time"] = {{"T", 15.0}, {"Nt", 128}};
  out.push_back({stem + "_T15", cfg, {IndicatorKind::i3}, {}});
}

std::string center_tag(const std::vector<double>& c) {
  std::string s = "c";
  for (double v : c) {
    s += v < 0 ? "m" : "";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v));
    for (char* p = buf; *p; ++p) {
      if (*p != '.') s.push_back(*p);
    }
  }
  return s;
}

IndicatorKind parse_indicator_cli(const std::string& name) { return parse_indicator(name); }

std::pair<int, double> parse_slice(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    fail(ErrorKind::config, "--slice: expected <axis>=<coord>, e.g. z3=0");
  }
  const std::string axis = text.substr(0, eq);
  int a = -1;
  if (axis == "x" || axis == "z1" || axis == "x1" || axis == "0") a = 0;
  if (axis == "y" || axis == "z2" || axis == "x2" || axis == "1") a = 1;
  if (axis == "z" || axis == "z3" || axis == "x3" || axis == "2") a = 2;
  if (a < 0) {
    fail(ErrorKind::config, "--slice: unknown axis '" + axis + "' (use z1, z2 or z3)");
  }
  char* end = nullptr;
  const std::string num = text.substr(eq + 1);
  const double v = std::strtod(num.c_str(), &end);
  if (num.empty() || *end != '\0') {
    fail(ErrorKind::config, "--slice: coordinate '" + num + "' is not a number");
  }
  return {a, v};
}

std::filesystem::path slice_path(const std::filesystem::path& out, int axis, double coord) {
  auto p = out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "_slice_z%d_%g", axis + 1, coord);
  p.replace_filename(out.stem().string() + buf + (out.has_extension() ? out.extension().string() : ".csv"));
  return p;
}

void log_field(const IndicatorField& f, std::ostream& log, const std::filesystem::path& path) {
  const Vec3& p = f.grid.point(f.argmax());
  log << path.string() << ": " << indicator_name(f.kind) << " argmax " << point_text(p, f.grid.dimension())
      << " max " << fmt(f.max_value()) << "\n";
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::config: return 2;
    case ErrorKind::solver: return 3;
    case ErrorKind::io:
    case ErrorKind::format: return 4;
  }
  return 2;
}

ScatteredDataSet synthesize(const RunConfig& cfg, int threads) {
  const Acquisition acq = cfg.acquisition();
  ScatteredDataSet clean;
  if (cfg.model == "bie_2d") {
    BieSynthOptions opts;
    opts.bie = cfg.bie;
    opts.spectral = cfg.spectral;
    opts.threads = threads;
    const auto curves = cfg.boundaries();
    clean = synth_bie_2d(curves, acq, opts);
  } else {
    const auto points = cfg.point_scatterers();
    clean = synth_point_model(points, acq, cfg.spectral);
  }
  ScatteredDataSet out = add_noise(clean, cfg.noise);
  out.metadata["config"] = config_echo(cfg);
  return out;
}

IndicatorField reconstruct_field(const ScatteredDataSet& data, const RunConfig& cfg, IndicatorKind kind,
                                 int threads) {
  if (kind == IndicatorKind::i1prime) {
    if (cfg.model != "point_model" || cfg.scatterers.size() != 1) {
      fail(ErrorKind::config, "i1prime needs point_model data with exactly one scatterer");
    }
    const PointScatterer base = cfg.point_scatterers().front();
    const Acquisition acq = data.acquisition;
    const SpectralOptions spectral = cfg.spectral;
    const TranslatedSynth synth = [=](const Vec3& z) {
      PointScatterer moved = base;
      moved.center = z;
      const std::vector<PointScatterer> one{moved};
      return synth_point_model(one, acq, spectral).values;
    };
    return sweep_i1prime(data, cfg.grid, synth, threads);
  }
  IndicatorOptions opts;
  opts.threads = threads;
  opts.spectral = cfg.spectral;
  return sweep(data, cfg.grid, kind, opts);
}

std::vector<ReproCase> repro_cases(int example, std::uint64_t seed) {
  std::vector<ReproCase> out;
  switch (example) {
    case 1: {
      for (double eps : {0.05, 0.20}) {
        json cfg = base_config(2, eps, seed);
        cfg["geometry"]["scatterers"] = json::array({scatterer("point", {0.0, 0.0})});
        add_2d_pair(out, eps == 0.05 ? "ex1_eps05" : "ex1_eps20", cfg);
      }
      break;
    }
    case 2: {
      const std::vector<std::vector<double>> centers{{-1, -1}, {1, 1.5}, {1.5, -1}, {-1.5, 1.5}, {0, 0}};
      for (std::size_t n : {2u, 3u, 5u}) {
        json cfg = base_config(2, 0.05, seed);
        json list = json::array();
        for (std::size_t m = 0; m < n; ++m) list.push_back(scatterer("point", centers[m]));
        cfg["geometry"]["scatterers"] = list;
        add_2d_pair(out, "ex2_points" + std::to_string(n), cfg);
      }
      break;
    }
    case 3: {
      for (const char* shape : {"circle", "kite", "starfish"}) {
        for (const std::vector<double>& c : {std::vector<double>{0, 0}, std::vector<double>{1, 1}}) {
          json cfg = base_config(2, 0.05, seed);
          cfg["forward"]["model"] = "bie_2d";
          cfg["geometry"]["scatterers"] = json::array({scatterer(shape, c)});
          add_2d_pair(out, std::string("ex3_") + shape + "_" + center_tag(c), cfg);
        }
      }
      for (auto [count, span, tag] : {std::tuple{10, "pi", "ap1"}, std::tuple{15, "3pi/2", "ap15"}}) {
        json cfg = base_config(2, 0.05, seed);
        cfg["forward"]["model"] = "bie_2d";
        cfg["geometry"]["sensors"]["count"] = count;
        cfg["geometry"]["sensors"]["aperture"] = span;
        cfg["geometry"]["scatterers"] = json::array({scatterer("starfish", {0, 0})});
        add_2d_pair(out, std::string("ex3_starfish_") + tag, cfg);
      }
      break;
    }
    case 4: {
      for (const char* shape : {"acorn", "rounded_square"}) {
        json cfg = base_config(2, 0.05, seed);
        cfg["forward"]["model"] = "bie_2d";
        cfg["geometry"]["scatterers"] =
            json::array({scatterer(shape, {0, 0}), scatterer("point", {2.2, 2.2}, 100.0)});
        add_2d_pair(out, std::string("ex4_") + shape, cfg);
      }
      break;
    }
    case 5: {
      const std::vector<std::tuple<std::string, std::string, double, std::string, double>> pairs{
          {"circle_kite", "circle", 4.0 / 9.0, "kite", 0.5},
          {"kite_peanut", "kite", 0.5, "peanut", 1.0},
          {"acorn_starfish", "acorn", 0.5, "starfish", 2.0 / 3.0},
      };
      for (const auto& [tag, a, sa, b, sb] : pairs) {
        json cfg = base_config(2, 0.05, seed);
        cfg["forward"]["model"] = "bie_2d";
        cfg["time"] = {{"T", 25.0}, {"Nt", 256}};
        cfg["geometry"]["scatterers"] = json::array({scatterer(a, {-1, -1}, sa), scatterer(b, {1, 1}, sb)});
        out.push_back({"ex5_" + tag, cfg, {IndicatorKind::i3}, {}});
      }
      break;
    }
    case 6: {
      // Cube scatterers of side 0.1 enter as point scatterers of that diameter.
      const std::vector<std::pair<std::string, std::vector<std::vector<double>>>> cases{
          {"d1", {{0, 0, 0}}},
          {"d2", {{0.4, -0.8, 0.2}}},
          {"d3d4", {{0.6, 0.8, 1.0}, {-1.0, -0.8, -0.6}}},
      };
      for (const auto& [tag, centers] : cases) {
        json cfg = base_config(3, 0.05, seed);
        cfg["time"] = {{"T", 19.0}, {"Nt", 256}};
        json list = json::array();
        ReproCase rc{"ex6_" + tag, {}, {IndicatorKind::i3}, {}};
        for (const auto& c : centers) {
          list.push_back(scatterer("point", c, 50.0));
          rc.slices.emplace_back(2, c[2]);
          rc.slices.emplace_back(1, c[1]);
        }
        cfg["geometry"]["scatterers"] = list;
        rc.config = cfg;
        out.push_back(std::move(rc));
      }
      break;
    }
    case 7: fail(ErrorKind::config, "out of scope: volumetric 3D forward solver");
    default: fail(ErrorKind::config, "repro: example id must be 1..6");
  }
  return out;
}

std::vector<std::filesystem::path> run_repro(int example, const std::filesystem::path& dir, std::uint64_t seed,
                                             int threads, std::ostream& log) {
  std::vector<std::filesystem::path> written;
  for (const auto& rc : repro_cases(example, seed)) {
    const RunConfig cfg = resolve_config(rc.config);
    for (const auto& w : separation_for(cfg).warnings) {
      log << rc.name << ": warning: " << w << "\n";
    }
    const ScatteredDataSet data = synthesize(cfg, threads);
    for (const auto& w : data.warnings) {
      log << rc.name << ": warning: " << w << "\n";
    }
    const auto tdis_path = dir / (rc.name + ".tdis");
    const std::string bytes = encode_tdis(data);
    atomic_write(tdis_path, bytes);
    written.push_back(tdis_path);
    FieldWriteInfo info;
    info.data_hash = "sha256:" + sha256_hex(bytes);
    info.config_echo = config_echo(cfg);
    for (IndicatorKind kind : rc.indicators) {
      const IndicatorField field = reconstruct_field(data, cfg, kind, threads);
      const auto csv = dir / (rc.name + "_" + std::string(indicator_name(kind)) + ".csv");
      write_field(field, csv, info);
      written.push_back(csv);
      log_field(field, log, csv);
      for (const auto& [axis, coord] : rc.slices) {
        const auto sp = slice_path(csv, axis, coord);
        write_field(slice_field(field, axis, coord), sp, info);
        written.push_back(sp);
      }
    }
  }
  return written;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-domain direct sampling reconstruction of acoustic scatterers", "tdsm"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_path;
  std::string indicator;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::vector<std::string> slices;
  int example = 0;

  auto* synth = app.add_subcommand("synth", "Synthesize scattered data from a config and write .tdis");
  synth->add_option("--config", config_path, "Run configuration")->required();
  synth->add_option("--out", out_path, "Output .tdis path")->required();
  synth->add_option("--seed", seed, "Override forward.seed");
  synth->add_option("--threads", threads, "Worker threads (0 = auto)");

  auto* recon = app.add_subcommand("reconstruct", "Mesh an indicator over the sampling grid");
  recon->add_option("--data", data_path, "Input .tdis")->required();
  recon->add_option("--indicator", indicator, "i1, i2, i3 or i1prime");
  recon->add_option("--config", config_path, "Config supplying the grid (default: the data's echoed config)");
  recon->add_option("--out", out_path, "Output .csv path");
  recon->add_option("--threads", threads, "Worker threads (0 = auto)");
  recon->add_option("--slice", slices, "3D only: also write the plane <axis>=<coord>, e.g. z3=0");

  auto* repro = app.add_subcommand("repro", "Reproduce example 1..6 end to end");
  repro->add_option("example", example, "Example id")->required();
  repro->add_option("--out", out_path, "Output directory (default: repro)");
  repro->add_option("--seed", seed, "Noise seed (default 1)");
  repro->add_option("--threads", threads, "Worker threads (0 = auto)");

  auto* validate = app.add_subcommand("validate", "Check a config and the sampling geometry");
  validate->add_option("--config", config_path, "Run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      json raw = load_config_file(config_path);
      if (seed) {
        raw["forward"]["seed"] = *seed;
      }
      const RunConfig cfg = resolve_config(raw);
      const ScatteredDataSet data = synthesize(cfg, threads);
      for (const auto& w : data.warnings) {
        err << "warning: " << w << "\n";
      }
      write_tdis(data, out_path);
      out << "wrote " << out_path << " (" << data.values.receivers() << " x " << data.values.times() << " x "
          << data.values.sources() << ")\n";
      return 0;
    }
    if (*recon) {
      const std::string bytes = read_file(data_path);
      const ScatteredDataSet data = decode_tdis(bytes);
      json raw;
      if (!config_path.empty()) {
        raw = load_config_file(config_path);
      } else {
        const auto it = data.metadata.find("config");
        if (it == data.metadata.end()) {
          fail(ErrorKind::config, "reconstruct: data has no echoed config; pass --config");
        }
        raw = parse_config_text(it->second);
      }
      if (!indicator.empty()) {
        (void)parse_indicator_cli(indicator);
        raw["reconstruct"]["indicator"] = indicator;
      }
      if (!out_path.empty()) {
        raw["reconstruct"]["out"] = out_path;
      }
      // The grid and model come from the config; time and sensors from the data.
      if (raw.contains("time")) {
        raw["time"]["T"] = data.acquisition.grid.terminal_time();
        raw["time"]["Nt"] = data.acquisition.grid.steps();
      }
      const RunConfig cfg = resolve_config(raw);
      if (cfg.dimension != data.acquisition.dimension()) {
        fail(ErrorKind::config, "reconstruct: config dimension differs from the data");
      }
      const IndicatorField field = reconstruct_field(data, cfg, cfg.indicator, threads);
      FieldWriteInfo info;
      info.data_hash = "sha256:" + sha256_hex(bytes);
      info.config_echo = config_echo(cfg);
      write_field(field, cfg.out, info);
      log_field(field, out, cfg.out);
      for (const auto& s : slices) {
        if (field.grid.dimension() != 3) {
          fail(ErrorKind::config, "--slice applies to 3D fields only");
        }
        const auto [axis, coord] = parse_slice(s);
        const auto sp = slice_path(cfg.out, axis, coord);
        write_field(slice_field(field, axis, coord), sp, info);
        out << "wrote " << sp.string() << "\n";
      }
      print_separation(separation_for(cfg), out);
      if (!field.flagged.empty()) {
        out << "warning: " << field.flagged.size() << " probe(s) coincide with sensors and were set to 0\n";
      }
      return 0;
    }
    if (*repro) {
      const std::filesystem::path dir = out_path.empty() ? std::filesystem::path("repro") : std::filesystem::path(out_path);
      const auto files = run_repro(example, dir, seed.value_or(1), threads, out);
      out << "wrote " << files.size() << " files to " << dir.string() << "\n";
      return 0;
    }
    if (*validate) {
      const RunConfig cfg = resolve_config(load_config_file(config_path));
      out << "config ok: model " << cfg.model << ", dimension " << cfg.dimension << ", " << cfg.sensors.size()
          << " sensors, " << cfg.grid.size() << " probes, " << cfg.scatterers.size() << " scatterer(s)\n";
      print_separation(separation_for(cfg), out);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace tdsm
