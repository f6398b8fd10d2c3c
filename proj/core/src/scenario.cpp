#include "isotrack/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace isotrack {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail_at(const std::string& path, int line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw std::runtime_error(path + ": " + msg);
}

double parse_number(const std::string& path, int line, const std::string& cell) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    fail_at(path, line, "not a number: '" + cell + "'");
  }
  if (pos != cell.size()) fail_at(path, line, "trailing junk after number: '" + cell + "'");
  return v;
}

std::vector<double> parse_numbers(const std::string& path, int line, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_number(path, line, trim(cell)));
  if (out.empty()) fail_at(path, line, "expected at least one number");
  return out;
}

Vec2 parse_vec2(const std::string& path, int line, const std::string& value) {
  const auto nums = parse_numbers(path, line, value);
  if (nums.size() != 2) fail_at(path, line, "expected two comma-separated numbers");
  return {nums[0], nums[1]};
}

const char* to_string(VehicleKind k) {
  switch (k) {
    case VehicleKind::dubins: return "dubins";
    case VehicleKind::single_integrator: return "single_integrator";
    case VehicleKind::double_integrator: return "double_integrator";
  }
  return "?";
}

const char* to_string(SdotMode m) {
  return m == SdotMode::measured ? "measured" : "oracle";
}

const char* to_string(HoldMode m) { return m == HoldMode::zoh ? "zoh" : "continuous"; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Collected raw entries plus presence bookkeeping for end-of-parse checks.
struct ParseState {
  std::string path;
  std::map<std::string, int> key_lines;  // first line each non-repeatable key appeared on

  bool seen(const std::string& key) const { return key_lines.count(key) > 0; }
  int line_of(const std::string& key) const { return key_lines.at(key); }

  void remember(const std::string& key, int line, bool repeatable) {
    auto [it, inserted] = key_lines.emplace(key, line);
    if (!inserted && !repeatable) {
      fail_at(path, line,
              "duplicate key '" + key + "' (first on line " + std::to_string(it->second) + ")");
    }
  }
};

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source_name) {
  Scenario s;
  ParseState st{source_name, {}};

  // raw field-spec slots until the kind is known to be complete
  std::string field_kind;
  CircularExpSpec circ;
  LinearRadialSpec lin;
  MultiGaussianSpec multi;
  GridSpec grid;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  Vec2 bounds_min, bounds_max;
  double bounds_step = 0.0;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string content = trim(raw);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail_at(source_name, line, "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) fail_at(source_name, line, "empty key");
    if (value.empty()) fail_at(source_name, line, "empty value for key '" + key + "'");

    const bool repeatable = key == "initial" || key == "field.component";
    st.remember(key, line, repeatable);

    const auto num = [&] { return parse_number(source_name, line, value); };
    const auto positive = [&](const char* what) {
      const double v = num();
      if (!(v > 0.0)) fail_at(source_name, line, std::string(what) + " must be positive");
      return v;
    };

    if (key == "name") {
      s.name = value;
    } else if (key == "field.kind") {
      if (value != "circular_exp" && value != "linear_radial" && value != "multi_gaussian" &&
          value != "grid") {
        fail_at(source_name, line, "unknown field.kind '" + value + "'");
      }
      field_kind = value;
    } else if (key == "field.intensity") {
      circ.intensity = positive("field.intensity");
    } else if (key == "field.decay") {
      circ.decay = positive("field.decay");
    } else if (key == "field.center") {
      circ.center = lin.center = parse_vec2(source_name, line, value);
    } else if (key == "field.level") {
      lin.level = num();
    } else if (key == "field.slope") {
      lin.slope = positive("field.slope");
    } else if (key == "field.radius") {
      lin.radius = positive("field.radius");
    } else if (key == "field.component") {
      const auto nums = parse_numbers(source_name, line, value);
      if (nums.size() != 4) {
        fail_at(source_name, line, "field.component needs amplitude, cx, cy, spread");
      }
      if (!(nums[3] > 0.0)) fail_at(source_name, line, "component spread must be positive");
      multi.components.push_back({nums[0], {nums[1], nums[2]}, nums[3]});
    } else if (key == "field.file") {
      grid.file = value;
    } else if (key == "field.log") {
      if (value != "true" && value != "false") {
        fail_at(source_name, line, "field.log must be true or false");
      }
      s.log_field = value == "true";
    } else if (key == "vehicle") {
      if (value == "dubins") s.vehicle = VehicleKind::dubins;
      else if (value == "single_integrator") s.vehicle = VehicleKind::single_integrator;
      else if (value == "double_integrator") s.vehicle = VehicleKind::double_integrator;
      else fail_at(source_name, line, "unknown vehicle '" + value + "'");
    } else if (key == "gains.c1") {
      s.gains.c1 = num();
    } else if (key == "gains.c2") {
      s.gains.c2 = num();
    } else if (key == "gains.c3") {
      s.gains.c3 = num();
    } else if (key == "gains.c4") {
      s.gains.c4 = positive("gains.c4");
    } else if (key == "gains.c5") {
      s.gains.c5 = num();
    } else if (key == "v") {
      s.v = positive("v");
    } else if (key == "s_d") {
      s.s_d = num();
      if (!std::isfinite(s.s_d)) fail_at(source_name, line, "s_d must be finite");
    } else if (key == "dt") {
      s.dt = positive("dt");
    } else if (key == "duration") {
      s.duration = num();
      if (!(s.duration >= 0.0)) fail_at(source_name, line, "duration must be non-negative");
    } else if (key == "sdot") {
      if (value == "measured") s.sdot_mode = SdotMode::measured;
      else if (value == "oracle") s.sdot_mode = SdotMode::oracle;
      else fail_at(source_name, line, "sdot must be measured or oracle");
    } else if (key == "hold") {
      if (value == "zoh") s.hold = HoldMode::zoh;
      else if (value == "continuous") s.hold = HoldMode::continuous;
      else fail_at(source_name, line, "hold must be zoh or continuous");
    } else if (key == "sgn_delta") {
      s.sgn_delta = num();
      if (!(s.sgn_delta >= 0.0)) fail_at(source_name, line, "sgn_delta must be non-negative");
    } else if (key == "settle_threshold") {
      s.settle_threshold = positive("settle_threshold");
    } else if (key == "initial") {
      const auto nums = parse_numbers(source_name, line, value);
      if (nums.size() != 3 && nums.size() != 4) {
        fail_at(source_name, line, "initial needs x, y, theta and optionally a speed");
      }
      InitialState init;
      init.p = {nums[0], nums[1]};
      init.theta = nums[2];
      if (nums.size() == 4) {
        if (!(nums[3] >= 0.0)) fail_at(source_name, line, "initial speed must be non-negative");
        init.speed = nums[3];
      }
      s.initial_states.push_back(init);
    } else if (key == "sweep.parameter") {
      sweep_parameter = value;
      if (value != "c1" && value != "c2" && value != "c3" && value != "c4" && value != "c5" &&
          value != "v" && value != "dt") {
        fail_at(source_name, line, "sweep.parameter must be one of c1, c2, c3, c4, c5, v, dt");
      }
    } else if (key == "sweep.values") {
      sweep_values = parse_numbers(source_name, line, value);
    } else if (key == "bounds.min") {
      bounds_min = parse_vec2(source_name, line, value);
    } else if (key == "bounds.max") {
      bounds_max = parse_vec2(source_name, line, value);
    } else if (key == "bounds.step") {
      bounds_step = positive("bounds.step");
    } else {
      fail_at(source_name, line, "unknown key '" + key + "'");
    }
  }

  // ----- presence and consistency -----
  const auto require_key = [&](const char* key) {
    if (!st.seen(key)) fail(source_name, std::string("missing required key '") + key + "'");
  };
  require_key("name");
  require_key("field.kind");

  const auto reject_keys = [&](std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
      if (st.seen(key)) {
        fail_at(source_name, st.line_of(key),
                "key '" + std::string(key) + "' is not valid for field.kind '" + field_kind + "'");
      }
    }
  };
  if (field_kind == "circular_exp") {
    require_key("field.intensity");
    require_key("field.decay");
    require_key("field.center");
    reject_keys({"field.level", "field.slope", "field.radius", "field.component", "field.file"});
    s.field = circ;
  } else if (field_kind == "linear_radial") {
    require_key("field.level");
    require_key("field.slope");
    require_key("field.radius");
    require_key("field.center");
    reject_keys({"field.intensity", "field.decay", "field.component", "field.file"});
    s.field = lin;
  } else if (field_kind == "multi_gaussian") {
    if (multi.components.empty()) fail(source_name, "missing required key 'field.component'");
    reject_keys({"field.intensity", "field.decay", "field.center", "field.level", "field.slope",
                 "field.radius", "field.file"});
    s.field = multi;
  } else {  // grid
    require_key("field.file");
    reject_keys({"field.intensity", "field.decay", "field.center", "field.level", "field.slope",
                 "field.radius", "field.component"});
    s.field = grid;
  }

  require_key("gains.c1");
  require_key("gains.c3");
  require_key("v");
  require_key("s_d");
  require_key("duration");
  if (s.initial_states.empty()) fail(source_name, "missing required key 'initial'");

  if (st.seen("sweep.parameter") != st.seen("sweep.values")) {
    fail(source_name, "sweep.parameter and sweep.values must appear together");
  }
  if (st.seen("sweep.parameter")) s.sweep = SweepSpec{sweep_parameter, sweep_values};

  const bool any_bounds =
      st.seen("bounds.min") || st.seen("bounds.max") || st.seen("bounds.step");
  if (any_bounds) {
    for (const char* key : {"bounds.min", "bounds.max", "bounds.step"}) require_key(key);
    if (!(bounds_min.x <= bounds_max.x && bounds_min.y <= bounds_max.y)) {
      fail_at(source_name, st.line_of("bounds.max"), "bounds.max must not be below bounds.min");
    }
    s.bounds = BoundsSpec{bounds_min, bounds_max, bounds_step};
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name = " << s.name << '\n';
  if (const auto* f = std::get_if<CircularExpSpec>(&s.field)) {
    out << "field.kind = circular_exp\n";
    out << "field.intensity = " << fmt(f->intensity) << '\n';
    out << "field.decay = " << fmt(f->decay) << '\n';
    out << "field.center = " << fmt(f->center.x) << ", " << fmt(f->center.y) << '\n';
  } else if (const auto* f = std::get_if<LinearRadialSpec>(&s.field)) {
    out << "field.kind = linear_radial\n";
    out << "field.level = " << fmt(f->level) << '\n';
    out << "field.slope = " << fmt(f->slope) << '\n';
    out << "field.radius = " << fmt(f->radius) << '\n';
    out << "field.center = " << fmt(f->center.x) << ", " << fmt(f->center.y) << '\n';
  } else if (const auto* f = std::get_if<MultiGaussianSpec>(&s.field)) {
    out << "field.kind = multi_gaussian\n";
    for (const auto& c : f->components) {
      out << "field.component = " << fmt(c.amplitude) << ", " << fmt(c.center.x) << ", "
          << fmt(c.center.y) << ", " << fmt(c.spread) << '\n';
    }
  } else if (const auto* f = std::get_if<GridSpec>(&s.field)) {
    out << "field.kind = grid\n";
    out << "field.file = " << f->file << '\n';
  }
  if (s.log_field) out << "field.log = true\n";
  out << "vehicle = " << to_string(s.vehicle) << '\n';
  out << "gains.c1 = " << fmt(s.gains.c1) << '\n';
  out << "gains.c2 = " << fmt(s.gains.c2) << '\n';
  out << "gains.c3 = " << fmt(s.gains.c3) << '\n';
  out << "gains.c4 = " << fmt(s.gains.c4) << '\n';
  out << "gains.c5 = " << fmt(s.gains.c5) << '\n';
  out << "v = " << fmt(s.v) << '\n';
  out << "s_d = " << fmt(s.s_d) << '\n';
  out << "dt = " << fmt(s.dt) << '\n';
  out << "duration = " << fmt(s.duration) << '\n';
  out << "sdot = " << to_string(s.sdot_mode) << '\n';
  out << "hold = " << to_string(s.hold) << '\n';
  out << "sgn_delta = " << fmt(s.sgn_delta) << '\n';
  out << "settle_threshold = " << fmt(s.settle_threshold) << '\n';
  for (const InitialState& init : s.initial_states) {
    out << "initial = " << fmt(init.p.x) << ", " << fmt(init.p.y) << ", " << fmt(init.theta);
    if (!std::isnan(init.speed)) out << ", " << fmt(init.speed);
    out << '\n';
  }
  if (s.sweep) {
    out << "sweep.parameter = " << s.sweep->parameter << '\n';
    out << "sweep.values =";
    for (std::size_t i = 0; i < s.sweep->values.size(); ++i) {
      out << (i == 0 ? " " : ", ") << fmt(s.sweep->values[i]);
    }
    out << '\n';
  }
  if (s.bounds) {
    out << "bounds.min = " << fmt(s.bounds->lo.x) << ", " << fmt(s.bounds->lo.y) << '\n';
    out << "bounds.max = " << fmt(s.bounds->hi.x) << ", " << fmt(s.bounds->hi.y) << '\n';
    out << "bounds.step = " << fmt(s.bounds->step) << '\n';
  }
  return out.str();
}

std::shared_ptr<const Field> make_field(const Scenario& s,
                                        const std::filesystem::path& base_dir) {
  std::shared_ptr<const Field> field;
  if (const auto* f = std::get_if<CircularExpSpec>(&s.field)) {
    field = std::make_shared<CircularExpField>(f->intensity, f->decay, f->center);
  } else if (const auto* f = std::get_if<LinearRadialSpec>(&s.field)) {
    field = std::make_shared<LinearRadialField>(f->level, f->slope, f->radius, f->center);
  } else if (const auto* f = std::get_if<MultiGaussianSpec>(&s.field)) {
    field = std::make_shared<MultiGaussianField>(f->components);
  } else if (const auto* f = std::get_if<GridSpec>(&s.field)) {
    std::filesystem::path p = f->file;
    if (p.is_relative()) p = base_dir / p;
    field = std::make_shared<GridField>(load_grid_field(p));
  }
  if (s.log_field) field = log_of(std::move(field));
  return field;
}

SimConfig make_sim_config(const Scenario& s, std::size_t initial_index,
                          const std::filesystem::path& base_dir) {
  if (initial_index >= s.initial_states.size()) {
    throw std::out_of_range("initial-state index out of range");
  }
  SimConfig cfg;
  cfg.field = make_field(s, base_dir);
  cfg.vehicle = s.vehicle;
  cfg.gains = s.gains;
  cfg.v = s.v;
  cfg.s_d = s.s_d;
  cfg.dt = s.dt;
  cfg.duration = s.duration;
  cfg.initial = s.initial_states[initial_index];
  cfg.sdot_mode = s.sdot_mode;
  cfg.hold = s.hold;
  cfg.sgn_delta = s.sgn_delta;
  cfg.settle_threshold = s.settle_threshold;
  return cfg;
}

std::optional<RadialView> radial_view(const Scenario& s) {
  if (const auto* f = std::get_if<LinearRadialSpec>(&s.field)) {
    if (s.log_field) return std::nullopt;  // log of a linear profile is not linear
    return RadialView{f->slope, f->radius};
  }
  if (const auto* f = std::get_if<CircularExpSpec>(&s.field)) {
    if (s.log_field) {
      const double r_d = (std::log(f->intensity) - s.s_d) / f->decay;
      if (!(r_d > 0.0)) {
        throw std::invalid_argument("target s_d is not below the log-field maximum");
      }
      return RadialView{f->decay, r_d};
    }
    if (!(s.s_d > 0.0 && s.s_d < f->intensity)) {
      throw std::invalid_argument("target s_d must lie in (0, intensity) for this field");
    }
    return RadialView{f->decay * s.s_d, std::log(f->intensity / s.s_d) / f->decay};
  }
  return std::nullopt;
}

}  // namespace isotrack
