#pragma once

// Scenario files: a line-oriented `key = value` format with dotted keys.
//
//   # Table-1 circular-field tracking
//   name = table1-circular
//   field.kind = circular_exp        # circular_exp | linear_radial | multi_gaussian | grid
//   field.intensity = 30             # circular_exp: intensity, decay, center
//   field.decay = 0.1
//   field.center = 5, 5
//   vehicle = dubins                 # dubins | single_integrator | double_integrator
//   gains.c1 = 10
//   gains.c2 = 1
//   gains.c3 = 0.3
//   gains.c4 = 1
//   v = 0.5
//   s_d = 20
//   dt = 0.01
//   duration = 400
//   sdot = measured                  # measured | oracle
//   hold = zoh                       # zoh | continuous
//   initial = 15, -5, 1.88495559     # x, y, theta [, speed] — repeatable
//   sweep.parameter = c1             # optional sweep block
//   sweep.values = 1, 5, 10, 30, 50
//   bounds.min = -10, -10            # optional bound-estimation region
//   bounds.max = 30, 30
//   bounds.step = 0.5
//
// Other field kinds:
//   linear_radial:  field.level, field.slope, field.radius, field.center
//   multi_gaussian: repeated field.component = amplitude, cx, cy, spread
//   grid:           field.file = path (relative to the scenario file)
// Any field may add `field.log = true` to track the log of the field.
//
// Parsing is strict: unknown keys, duplicates, missing required keys, and
// out-of-range values raise std::runtime_error with "path:line: message".
// serialize_scenario emits a canonical form: parse -> serialize -> parse is
// the identity.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "isotrack/sim.hpp"

namespace isotrack {

struct CircularExpSpec {
  double intensity = 0.0;
  double decay = 0.0;
  Vec2 center;
  friend bool operator==(const CircularExpSpec&, const CircularExpSpec&) = default;
};

struct LinearRadialSpec {
  double level = 0.0;
  double slope = 0.0;
  double radius = 0.0;
  Vec2 center;
  friend bool operator==(const LinearRadialSpec&, const LinearRadialSpec&) = default;
};

struct MultiGaussianSpec {
  std::vector<MultiGaussianField::Component> components;
  friend bool operator==(const MultiGaussianSpec&, const MultiGaussianSpec&) = default;
};

struct GridSpec {
  std::string file;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using FieldSpec = std::variant<CircularExpSpec, LinearRadialSpec, MultiGaussianSpec, GridSpec>;

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct BoundsSpec {
  Vec2 lo;
  Vec2 hi;
  double step = 0.0;
  friend bool operator==(const BoundsSpec&, const BoundsSpec&) = default;
};

struct Scenario {
  std::string name;
  FieldSpec field;
  bool log_field = false;
  VehicleKind vehicle = VehicleKind::dubins;
  Gains gains;
  double v = 0.5;
  double s_d = 0.0;
  double dt = 0.01;
  double duration = 0.0;
  std::vector<InitialState> initial_states;
  SdotMode sdot_mode = SdotMode::measured;
  HoldMode hold = HoldMode::zoh;
  double sgn_delta = 0.0;
  double settle_threshold = 0.05;
  std::optional<SweepSpec> sweep;
  std::optional<BoundsSpec> bounds;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario parse_scenario(std::string_view text, const std::string& source_name = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& s);

// Instantiates the field; grid paths resolve against base_dir.
std::shared_ptr<const Field> make_field(const Scenario& s,
                                        const std::filesystem::path& base_dir = ".");

// Builds the SimConfig for one entry of the initial-state list.
SimConfig make_sim_config(const Scenario& s, std::size_t initial_index,
                          const std::filesystem::path& base_dir = ".");

// Linear-slope view of a radial scenario for the analysis module:
//  - linear_radial: slope and radius as declared;
//  - circular_exp: effective slope decay*s_d at the target isoline and its
//    radius ln(intensity/s_d)/decay (requires 0 < s_d < intensity);
//  - log-wrapped circular_exp: exact slope decay, radius (ln intensity - s_d)/decay.
// nullopt for field kinds with no radial structure.
struct RadialView {
  double alpha = 0.0;
  double r_d = 0.0;
};
std::optional<RadialView> radial_view(const Scenario& s);

}  // namespace isotrack
