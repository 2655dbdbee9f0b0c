#include "chaos_ns_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chaos_ns/errors.hpp"
#include "chaos_ns/multi_index.hpp"
#include "chaos_ns/snapshot.hpp"
#include "chaos_ns/spectral_ops.hpp"

namespace chaos_ns::cli {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError(join(path, key), "unknown field");
}

const json* find(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < -1000000000 || v > 1000000000) throw ConfigError(path, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ConfigError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

template <class T, class F>
void optional_field(const json& obj, const std::string& path, const std::string& key, T& target, F convert) {
  if (const json* v = find(obj, key)) target = convert(*v, join(path, key));
}

std::array<double, 2> pair_of_numbers(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected an array of two numbers");
  return {number(j[0], item(path, 0)), number(j[1], item(path, 1))};
}

std::array<int, 2> pair_of_ints(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected an array of two integers");
  return {integer(j[0], item(path, 0)), integer(j[1], item(path, 1))};
}

FieldSpec parse_field(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected a field object with a \"kind\"");
  const json* kind = find(j, "kind");
  if (kind == nullptr) throw ConfigError(join(path, "kind"), "missing");
  const std::string k = string(*kind, join(path, "kind"));
  FieldSpec spec;
  if (k == "zero") {
    require_object(j, path, {"kind"});
    spec.kind = FieldSpec::Kind::Zero;
  } else if (k == "taylor-green") {
    require_object(j, path, {"kind", "amplitude"});
    spec.kind = FieldSpec::Kind::TaylorGreen;
    optional_field(j, path, "amplitude", spec.amplitude, number);
  } else if (k == "modes") {
    require_object(j, path, {"kind", "modes"});
    spec.kind = FieldSpec::Kind::Modes;
    const json* modes = find(j, "modes");
    const std::string mp = join(path, "modes");
    if (modes == nullptr || !modes->is_array()) throw ConfigError(mp, "expected an array of modes");
    for (std::size_t i = 0; i < modes->size(); ++i) {
      const json& m = (*modes)[i];
      const std::string p = item(mp, i);
      require_object(m, p, {"k", "amplitude", "phase"});
      ModeSpec mode;
      if (!find(m, "k")) throw ConfigError(join(p, "k"), "missing");
      if (!find(m, "amplitude")) throw ConfigError(join(p, "amplitude"), "missing");
      mode.k = pair_of_ints(m["k"], join(p, "k"));
      mode.amplitude = pair_of_numbers(m["amplitude"], join(p, "amplitude"));
      if (const json* ph = find(m, "phase")) {
        const std::string s = string(*ph, join(p, "phase"));
        if (s == "cos") mode.phase = Phase::Cosine;
        else if (s == "sin") mode.phase = Phase::Sine;
        else throw ConfigError(join(p, "phase"), "expected \"cos\" or \"sin\"");
      }
      spec.modes.push_back(mode);
    }
  } else if (k == "file") {
    require_object(j, path, {"kind", "path"});
    spec.kind = FieldSpec::Kind::File;
    if (!find(j, "path")) throw ConfigError(join(path, "path"), "missing");
    spec.path = string(j["path"], join(path, "path"));
  } else {
    throw ConfigError(join(path, "kind"), "expected zero, taylor-green, modes or file");
  }
  return spec;
}

ordered echo_field(const FieldSpec& f) {
  ordered o;
  switch (f.kind) {
    case FieldSpec::Kind::Zero:
      o["kind"] = "zero";
      break;
    case FieldSpec::Kind::TaylorGreen:
      o["kind"] = "taylor-green";
      o["amplitude"] = f.amplitude;
      break;
    case FieldSpec::Kind::Modes: {
      o["kind"] = "modes";
      ordered list = ordered::array();
      for (const auto& m : f.modes) {
        ordered e;
        e["k"] = m.k;
        e["amplitude"] = m.amplitude;
        e["phase"] = m.phase == Phase::Cosine ? "cos" : "sin";
        list.push_back(e);
      }
      o["modes"] = list;
      break;
    }
    case FieldSpec::Kind::File:
      o["kind"] = "file";
      o["path"] = f.path;
      break;
  }
  return o;
}

void validate_field(const FieldSpec& f, const ExperimentConfig& c, const std::string& path) {
  const int lim = c.grid.n / 3;
  for (std::size_t i = 0; i < f.modes.size(); ++i) {
    const auto& m = f.modes[i];
    const std::string p = join(item(join(path, "modes"), i), "k");
    if (m.k[0] == 0 && m.k[1] == 0) throw ConfigError(p, "the mean mode is not allowed (fields are mean-zero)");
    if (std::abs(m.k[0]) > lim || std::abs(m.k[1]) > lim)
      throw ConfigError(p, "wave outside the dealiased band |k_j| <= " + std::to_string(lim));
  }
  if (f.kind == FieldSpec::Kind::TaylorGreen && c.grid.n < 4) throw ConfigError(path, "grid too small");
}

void validate(const ExperimentConfig& c) {
  const int n = c.grid.n;
  if (n < 4 || n > 4096 || (n & (n - 1)) != 0) throw ConfigError("grid.n", "must be a power of two in [4, 4096]");
  if (!(c.grid.length > 0.0)) throw ConfigError("grid.length", "must be positive");
  if (!(c.physics.nu > 0.0)) throw ConfigError("physics.nu", "ellipticity requires nu > 0");
  if (c.physics.C0 < 0.0) throw ConfigError("physics.C0", "must be >= 0 (0 disables transport noise)");
  if (!(c.physics.kappa > 0.0 && c.physics.kappa < 2.0)) throw ConfigError("physics.kappa", "must lie in (0, 2)");
  if (c.physics.C0 > 0.0) {
    if (c.physics.K_noise < 1 || c.physics.K_noise > n / 3)
      throw ConfigError("physics.K_noise", "must lie in [1, " + std::to_string(n / 3) + "]");
    const int modes = 2 * kraichnan_representatives(c.physics.K_noise);
    if (c.chaos.n_w != modes)
      throw ConfigError("chaos.n_w", "must equal the Kraichnan mode count " + std::to_string(modes) +
                                         " for K_noise = " + std::to_string(c.physics.K_noise));
  }
  if (c.chaos.P < 0) throw ConfigError("chaos.P", "must be >= 0");
  if (c.chaos.n_t < 1) throw ConfigError("chaos.n_t", "must be >= 1");
  if (c.chaos.n_w < 1) throw ConfigError("chaos.n_w", "must be >= 1");
  if (index_set_cardinality({c.chaos.P, c.chaos.n_t, c.chaos.n_w}) > kDefaultSizeCap)
    throw ConfigError("chaos.P", "index set exceeds " + std::to_string(kDefaultSizeCap) + " entries");
  if (c.chaos.P > kDefaultOrderCap) throw ConfigError("chaos.P", "exceeds the factorial order cap");
  if (c.mc.M < 1) throw ConfigError("mc.M", "must be >= 1");
  if (!(c.time.dt > 0.0)) throw ConfigError("time.dt", "must be positive");
  if (!(c.time.T > 0.0)) throw ConfigError("time.T", "must be positive");
  const double steps = c.time.T / c.time.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps || std::round(steps) < 1)
    throw ConfigError("time.T", "must be a whole number of steps dt");
  if (c.time.output_stride < 1) throw ConfigError("time.output_stride", "must be >= 1");

  validate_field(c.forcing.u0, c, "forcing.u0");
  validate_field(c.forcing.f, c, "forcing.f");
  validate_field(c.forcing.f_div[0], c, "forcing.f_div[0]");
  validate_field(c.forcing.f_div[1], c, "forcing.f_div[1]");
  std::set<int> seen_g;
  for (std::size_t i = 0; i < c.forcing.g.size(); ++i) {
    const auto& g = c.forcing.g[i];
    const std::string p = item("forcing.g", i);
    if (g.noise_mode < 1 || g.noise_mode > c.chaos.n_w)
      throw ConfigError(join(p, "noise_mode"), "must lie in [1, n_w]");
    if (!seen_g.insert(g.noise_mode).second) throw ConfigError(join(p, "noise_mode"), "duplicate noise mode");
    validate_field(g.field, c, join(p, "field"));
  }
  std::set<std::pair<int, int>> seen_h;
  for (std::size_t i = 0; i < c.forcing.h.size(); ++i) {
    const auto& h = c.forcing.h[i];
    const std::string p = item("forcing.h", i);
    if (h.component < 1 || h.component > 2) throw ConfigError(join(p, "component"), "must be 1 or 2");
    if (h.noise_mode < 1 || h.noise_mode > c.chaos.n_w)
      throw ConfigError(join(p, "noise_mode"), "must lie in [1, n_w]");
    if (!seen_h.insert({h.component, h.noise_mode}).second) throw ConfigError(p, "duplicate (component, noise_mode)");
    validate_field(h.field, c, join(p, "field"));
  }
  if (c.flags.mollifier_cutoff < -1) throw ConfigError("flags.mollifier_cutoff", "must be >= -1 (-1 disables)");
  if (c.compare.xi_samples < 1) throw ConfigError("compare.xi_samples", "must be >= 1");
  for (std::size_t i = 0; i < c.compare.pathwise_orders.size(); ++i) {
    const int p = c.compare.pathwise_orders[i];
    if (p < 0 || p > kDefaultOrderCap) throw ConfigError(item("compare.pathwise_orders", i), "order out of range");
    if (index_set_cardinality({p, c.chaos.n_t, c.chaos.n_w}) > kDefaultSizeCap)
      throw ConfigError(item("compare.pathwise_orders", i), "index set too large");
  }
  for (const auto& [name, v] : {std::pair{"mean_se_factor", c.compare.mean_se_factor},
                                {"moment_se_factor", c.compare.moment_se_factor},
                                {"moment_rel_margin", c.compare.moment_rel_margin},
                                {"oracle_rel_tol", c.compare.oracle_rel_tol},
                                {"oracle_se_factor", c.compare.oracle_se_factor},
                                {"chaos_variance_rel_tol", c.compare.chaos_variance_rel_tol}})
    if (!(v >= 0.0)) throw ConfigError(std::string("compare.") + name, "must be >= 0");
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

SpectralField build_field(const FieldSpec& spec, const chaos_ns::Grid& grid, const std::filesystem::path& base,
                          const std::string& path) {
  SpectralField out(grid);
  switch (spec.kind) {
    case FieldSpec::Kind::Zero:
      break;
    case FieldSpec::Kind::TaylorGreen:
      out = taylor_green(grid, spec.amplitude);
      break;
    case FieldSpec::Kind::Modes:
      for (const auto& m : spec.modes) add_plane_wave(out, m.k, m.amplitude, m.phase);
      break;
    case FieldSpec::Kind::File: {
      const std::filesystem::path file = base / spec.path;
      std::ifstream in(file, std::ios::binary);
      if (!in) throw ConfigError(join(path, "path"), "cannot open " + file.string());
      const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      try {
        const VectorSamples s = decode_snapshot(bytes, grid.length());
        if (s.grid.n() != grid.n()) throw ConfigError(join(path, "path"), "snapshot grid does not match grid.n");
        out = from_grid(s);
      } catch (const Error& e) {
        throw ConfigError(join(path, "path"), e.what());
      }
      break;
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("", "JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  require_object(root, "", {"grid", "physics", "chaos", "mc", "time", "forcing", "flags", "compare"});

  if (const json* g = find(root, "grid")) {
    require_object(*g, "grid", {"n", "length"});
    optional_field(*g, "grid", "n", c.grid.n, integer);
    optional_field(*g, "grid", "length", c.grid.length, number);
  }
  if (const json* p = find(root, "physics")) {
    require_object(*p, "physics", {"nu", "b", "C0", "kappa", "K_noise"});
    optional_field(*p, "physics", "nu", c.physics.nu, number);
    optional_field(*p, "physics", "b", c.physics.b, pair_of_numbers);
    optional_field(*p, "physics", "C0", c.physics.C0, number);
    optional_field(*p, "physics", "kappa", c.physics.kappa, number);
    optional_field(*p, "physics", "K_noise", c.physics.K_noise, integer);
  }
  if (const json* p = find(root, "chaos")) {
    require_object(*p, "chaos", {"P", "n_t", "n_w"});
    optional_field(*p, "chaos", "P", c.chaos.P, integer);
    optional_field(*p, "chaos", "n_t", c.chaos.n_t, integer);
    optional_field(*p, "chaos", "n_w", c.chaos.n_w, integer);
  }
  if (const json* p = find(root, "mc")) {
    require_object(*p, "mc", {"M", "seed"});
    optional_field(*p, "mc", "M", c.mc.M, integer);
    optional_field(*p, "mc", "seed", c.mc.seed, unsigned_integer);
  }
  if (const json* p = find(root, "time")) {
    require_object(*p, "time", {"dt", "T", "output_stride"});
    optional_field(*p, "time", "dt", c.time.dt, number);
    optional_field(*p, "time", "T", c.time.T, number);
    optional_field(*p, "time", "output_stride", c.time.output_stride, integer);
  }
  if (const json* p = find(root, "forcing")) {
    require_object(*p, "forcing", {"u0", "f", "f_div", "g", "h"});
    optional_field(*p, "forcing", "u0", c.forcing.u0, parse_field);
    optional_field(*p, "forcing", "f", c.forcing.f, parse_field);
    if (const json* fd = find(*p, "f_div")) {
      if (!fd->is_array() || fd->size() != 2) throw ConfigError("forcing.f_div", "expected an array of two fields");
      for (std::size_t j = 0; j < 2; ++j) c.forcing.f_div[j] = parse_field((*fd)[j], item("forcing.f_div", j));
    }
    if (const json* g = find(*p, "g")) {
      if (!g->is_array()) throw ConfigError("forcing.g", "expected an array");
      for (std::size_t i = 0; i < g->size(); ++i) {
        const std::string ip = item("forcing.g", i);
        require_object((*g)[i], ip, {"noise_mode", "field"});
        GSpec spec;
        optional_field((*g)[i], ip, "noise_mode", spec.noise_mode, integer);
        if (!find((*g)[i], "field")) throw ConfigError(join(ip, "field"), "missing");
        spec.field = parse_field((*g)[i]["field"], join(ip, "field"));
        c.forcing.g.push_back(std::move(spec));
      }
    }
    if (const json* h = find(*p, "h")) {
      if (!h->is_array()) throw ConfigError("forcing.h", "expected an array");
      for (std::size_t i = 0; i < h->size(); ++i) {
        const std::string ip = item("forcing.h", i);
        require_object((*h)[i], ip, {"component", "noise_mode", "field"});
        HSpec spec;
        optional_field((*h)[i], ip, "component", spec.component, integer);
        optional_field((*h)[i], ip, "noise_mode", spec.noise_mode, integer);
        if (!find((*h)[i], "field")) throw ConfigError(join(ip, "field"), "missing");
        spec.field = parse_field((*h)[i]["field"], join(ip, "field"));
        c.forcing.h.push_back(std::move(spec));
      }
    }
  }
  if (const json* p = find(root, "flags")) {
    require_object(*p, "flags",
                   {"h_g_coupling_variant", "mollifier_cutoff", "cfl_policy", "convection", "alpha_snapshots"});
    if (const json* v = find(*p, "h_g_coupling_variant")) {
      const std::string s = string(*v, "flags.h_g_coupling_variant");
      if (s == "mean-only") c.flags.h_g_coupling_variant = HgCoupling::MeanOnly;
      else if (s == "all-indices") c.flags.h_g_coupling_variant = HgCoupling::AllIndices;
      else throw ConfigError("flags.h_g_coupling_variant", "expected \"mean-only\" or \"all-indices\"");
    }
    optional_field(*p, "flags", "mollifier_cutoff", c.flags.mollifier_cutoff, integer);
    if (const json* v = find(*p, "cfl_policy")) {
      const std::string s = string(*v, "flags.cfl_policy");
      if (s == "error") c.flags.cfl_policy = CflPolicy::Error;
      else if (s == "warn") c.flags.cfl_policy = CflPolicy::Warn;
      else throw ConfigError("flags.cfl_policy", "expected \"error\" or \"warn\"");
    }
    optional_field(*p, "flags", "convection", c.flags.convection, boolean);
    optional_field(*p, "flags", "alpha_snapshots", c.flags.alpha_snapshots, boolean);
  }
  if (const json* p = find(root, "compare")) {
    require_object(*p, "compare",
                   {"xi_samples", "xi_seed", "pathwise_orders", "mean_se_factor", "moment_se_factor",
                    "moment_rel_margin", "oracle_rel_tol", "oracle_se_factor", "chaos_variance_rel_tol"});
    optional_field(*p, "compare", "xi_samples", c.compare.xi_samples, integer);
    optional_field(*p, "compare", "xi_seed", c.compare.xi_seed, unsigned_integer);
    if (const json* v = find(*p, "pathwise_orders")) {
      if (!v->is_array()) throw ConfigError("compare.pathwise_orders", "expected an array of integers");
      c.compare.pathwise_orders.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        c.compare.pathwise_orders.push_back(integer((*v)[i], item("compare.pathwise_orders", i)));
    }
    optional_field(*p, "compare", "mean_se_factor", c.compare.mean_se_factor, number);
    optional_field(*p, "compare", "moment_se_factor", c.compare.moment_se_factor, number);
    optional_field(*p, "compare", "moment_rel_margin", c.compare.moment_rel_margin, number);
    optional_field(*p, "compare", "oracle_rel_tol", c.compare.oracle_rel_tol, number);
    optional_field(*p, "compare", "oracle_se_factor", c.compare.oracle_se_factor, number);
    optional_field(*p, "compare", "chaos_variance_rel_tol", c.compare.chaos_variance_rel_tol, number);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string canonical_echo(const ExperimentConfig& c) {
  ordered root;
  root["grid"] = {{"n", c.grid.n}, {"length", c.grid.length}};
  root["physics"] = {{"nu", c.physics.nu},
                     {"b", c.physics.b},
                     {"C0", c.physics.C0},
                     {"kappa", c.physics.kappa},
                     {"K_noise", c.physics.K_noise}};
  root["chaos"] = {{"P", c.chaos.P}, {"n_t", c.chaos.n_t}, {"n_w", c.chaos.n_w}};
  root["mc"] = {{"M", c.mc.M}, {"seed", c.mc.seed}};
  root["time"] = {{"dt", c.time.dt}, {"T", c.time.T}, {"output_stride", c.time.output_stride}};
  ordered forcing;
  forcing["u0"] = echo_field(c.forcing.u0);
  forcing["f"] = echo_field(c.forcing.f);
  forcing["f_div"] = ordered::array({echo_field(c.forcing.f_div[0]), echo_field(c.forcing.f_div[1])});
  ordered g = ordered::array();
  for (const auto& s : c.forcing.g) {
    ordered e;
    e["noise_mode"] = s.noise_mode;
    e["field"] = echo_field(s.field);
    g.push_back(e);
  }
  forcing["g"] = g;
  ordered h = ordered::array();
  for (const auto& s : c.forcing.h) {
    ordered e;
    e["component"] = s.component;
    e["noise_mode"] = s.noise_mode;
    e["field"] = echo_field(s.field);
    h.push_back(e);
  }
  forcing["h"] = h;
  root["forcing"] = forcing;
  ordered flags;
  flags["h_g_coupling_variant"] =
      c.flags.h_g_coupling_variant == HgCoupling::MeanOnly ? "mean-only" : "all-indices";
  flags["mollifier_cutoff"] = c.flags.mollifier_cutoff;
  flags["cfl_policy"] = c.flags.cfl_policy == CflPolicy::Error ? "error" : "warn";
  flags["convection"] = c.flags.convection;
  flags["alpha_snapshots"] = c.flags.alpha_snapshots;
  root["flags"] = flags;
  ordered cmp;
  cmp["xi_samples"] = c.compare.xi_samples;
  cmp["xi_seed"] = c.compare.xi_seed;
  cmp["pathwise_orders"] = c.compare.pathwise_orders;
  cmp["mean_se_factor"] = c.compare.mean_se_factor;
  cmp["moment_se_factor"] = c.compare.moment_se_factor;
  cmp["moment_rel_margin"] = c.compare.moment_rel_margin;
  cmp["oracle_rel_tol"] = c.compare.oracle_rel_tol;
  cmp["oracle_se_factor"] = c.compare.oracle_se_factor;
  cmp["chaos_variance_rel_tol"] = c.compare.chaos_variance_rel_tol;
  root["compare"] = cmp;
  return root.dump(2) + "\n";
}

Experiment build_experiment(const ExperimentConfig& c) {
  const chaos_ns::Grid grid(c.grid.n, c.grid.length);
  NoiseModel noise = [&] {
    if (c.physics.C0 > 0.0)
      return NoiseModel::kraichnan(grid, KraichnanParams{.c0 = c.physics.C0, .kappa = c.physics.kappa, .cutoff = c.physics.K_noise});
    return NoiseModel(grid, c.chaos.n_w);
  }();
  for (std::size_t i = 0; i < c.forcing.g.size(); ++i) {
    const auto& g = c.forcing.g[i];
    noise.set_g(g.noise_mode - 1, build_field(g.field, grid, c.base_dir, join(item("forcing.g", i), "field")));
  }
  for (std::size_t i = 0; i < c.forcing.h.size(); ++i) {
    const auto& h = c.forcing.h[i];
    noise.set_h(h.component - 1, h.noise_mode - 1,
                build_field(h.field, grid, c.base_dir, join(item("forcing.h", i), "field")));
  }
  Forcing forcing;
  if (c.forcing.f.kind != FieldSpec::Kind::Zero)
    forcing.f = build_field(c.forcing.f, grid, c.base_dir, "forcing.f");
  for (std::size_t j = 0; j < 2; ++j)
    if (c.forcing.f_div[j].kind != FieldSpec::Kind::Zero)
      forcing.f_div[j] = build_field(c.forcing.f_div[j], grid, c.base_dir, item("forcing.f_div", j));
  SpectralField u0 = build_field(c.forcing.u0, grid, c.base_dir, "forcing.u0");
  const double mean = std::abs(u0(0, 0, 0)) + std::abs(u0(1, 0, 0));
  if (mean > 1e-12 * std::max(1.0, l2_norm(u0))) throw ConfigError("forcing.u0", "initial field must be mean-zero");
  return Experiment{grid, std::move(noise), std::move(u0), std::move(forcing)};
}

PropagatorConfig propagator_config(const ExperimentConfig& c, const Experiment& e) {
  PropagatorConfig p;
  p.nu = c.physics.nu;
  p.drift = c.physics.b;
  p.forcing = e.forcing;
  p.hg_coupling = c.flags.h_g_coupling_variant;
  p.convection = c.flags.convection;
  p.dt = c.time.dt;
  p.horizon = c.time.T;
  p.cfl = c.flags.cfl_policy;
  return p;
}

McConfig mc_config(const ExperimentConfig& c, const Experiment& e) {
  McConfig m(e.noise);
  m.nu = c.physics.nu;
  m.drift = c.physics.b;
  m.forcing = e.forcing;
  m.hg_coupling = c.flags.h_g_coupling_variant;
  m.convection = c.flags.convection;
  m.mollifier_cutoff = c.flags.mollifier_cutoff;
  m.dt = c.time.dt;
  m.horizon = c.time.T;
  m.output_stride = c.time.output_stride;
  m.paths = c.mc.M;
  m.seed = c.mc.seed;
  m.cfl = c.flags.cfl_policy;
  return m;
}

}  // namespace chaos_ns::cli
