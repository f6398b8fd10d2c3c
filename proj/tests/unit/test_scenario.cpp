#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "isotrack/scenario.hpp"

using namespace isotrack;
using doctest::Contains;

namespace {

const char* kMinimal =
    "name = minimal\n"
    "field.kind = circular_exp\n"
    "field.intensity = 30\n"
    "field.decay = 0.1\n"
    "field.center = 5, 5\n"
    "gains.c1 = 10\n"
    "gains.c3 = 0.3\n"
    "v = 0.5\n"
    "s_d = 20\n"
    "duration = 120\n"
    "initial = 15, -5, 0\n";

// Replaces the first line that starts with `prefix` by `repl` (drops it when
// repl is empty), so each error case edits one key of the valid base text.
std::string with_line(const std::string& base, const std::string& prefix,
                      const std::string& repl) {
  std::string out;
  bool done = false;
  std::size_t pos = 0;
  while (pos < base.size()) {
    const std::size_t nl = base.find('\n', pos);
    const std::string line = base.substr(pos, nl - pos);
    if (!done && line.rfind(prefix, 0) == 0) {
      if (!repl.empty()) out += repl + "\n";
      done = true;
    } else {
      out += line + "\n";
    }
    pos = (nl == std::string::npos) ? base.size() : nl + 1;
  }
  if (!done && !repl.empty()) out += repl + "\n";
  return out;
}

std::filesystem::path scratch_dir() {
  const std::filesystem::path dir = "scenario_scratch";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal scenario parses with documented defaults") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.name == "minimal");
  const auto& f = std::get<CircularExpSpec>(s.field);
  CHECK(f.intensity == 30.0);
  CHECK(f.decay == 0.1);
  CHECK(f.center == Vec2{5.0, 5.0});
  CHECK(!s.log_field);
  CHECK(s.vehicle == VehicleKind::dubins);
  CHECK(s.gains.c1 == 10.0);
  CHECK(s.gains.c2 == 0.0);
  CHECK(s.gains.c3 == 0.3);
  CHECK(s.gains.c4 == 1.0);
  CHECK(s.gains.c5 == 0.0);
  CHECK(s.v == 0.5);
  CHECK(s.s_d == 20.0);
  CHECK(s.dt == 0.01);
  CHECK(s.duration == 120.0);
  REQUIRE(s.initial_states.size() == 1);
  CHECK(s.initial_states[0].p == Vec2{15.0, -5.0});
  CHECK(s.initial_states[0].theta == 0.0);
  CHECK(std::isnan(s.initial_states[0].speed));
  CHECK(s.sdot_mode == SdotMode::measured);
  CHECK(s.hold == HoldMode::zoh);
  CHECK(s.sgn_delta == 0.0);
  CHECK(s.settle_threshold == 0.05);
  CHECK(!s.sweep);
  CHECK(!s.bounds);
}

TEST_CASE("comments, blank lines, CRLF and repeated initial states") {
  const std::string text =
      "# tracking demo\r\n"
      "name = demo   # trailing comment\r\n"
      "\r\n"
      "field.kind = circular_exp\n"
      "field.intensity = 30\n"
      "field.decay = 0.1\n"
      "field.center = 5, 5\n"
      "vehicle = double_integrator\n"
      "gains.c1 = 30\n"
      "gains.c2 = 0.1\n"
      "gains.c3 = 0.1\n"
      "gains.c4 = 1\n"
      "gains.c5 = 0.1\n"
      "v = 0.5\n"
      "s_d = 20\n"
      "dt = 0.001\n"
      "duration = 20\n"
      "sdot = oracle\n"
      "hold = continuous\n"
      "sgn_delta = 0.001\n"
      "settle_threshold = 0.01\n"
      "initial = 15, -5, 1.5\n"
      "initial = 9, 5, -1.5707963267948966, 1\n";
  const Scenario s = parse_scenario(text);
  CHECK(s.name == "demo");
  CHECK(s.vehicle == VehicleKind::double_integrator);
  CHECK(s.gains.c5 == 0.1);
  CHECK(s.sdot_mode == SdotMode::oracle);
  CHECK(s.hold == HoldMode::continuous);
  CHECK(s.sgn_delta == 0.001);
  CHECK(s.settle_threshold == 0.01);
  REQUIRE(s.initial_states.size() == 2);
  CHECK(std::isnan(s.initial_states[0].speed));
  CHECK(s.initial_states[1].speed == 1.0);
}

TEST_CASE("sweep and bounds blocks") {
  std::string text(kMinimal);
  text +=
      "sweep.parameter = c1\n"
      "sweep.values = 1, 5, 10, 30, 50\n"
      "bounds.min = -10, -10\n"
      "bounds.max = 30, 30\n"
      "bounds.step = 0.5\n";
  const Scenario s = parse_scenario(text);
  REQUIRE(s.sweep.has_value());
  CHECK(s.sweep->parameter == "c1");
  CHECK(s.sweep->values == std::vector<double>{1.0, 5.0, 10.0, 30.0, 50.0});
  REQUIRE(s.bounds.has_value());
  CHECK(s.bounds->lo == Vec2{-10.0, -10.0});
  CHECK(s.bounds->hi == Vec2{30.0, 30.0});
  CHECK(s.bounds->step == 0.5);
}

TEST_CASE("parse errors name the file, line and problem") {
  const std::string base(kMinimal);
  const auto throws_with = [&](const std::string& text, const char* needle) {
    CHECK_THROWS_WITH_AS(parse_scenario(text, "file.scn"), Contains(needle),
                         std::runtime_error);
  };
  throws_with(with_line(base, "s_d", ""), "missing required key 's_d'");
  throws_with(base + "bogus = 1\n", "unknown key 'bogus'");
  throws_with(base + "v = 0.6\n", "duplicate key 'v' (first on line 8)");
  throws_with(base + "vehicle = plane\n", "unknown vehicle 'plane'");
  throws_with(with_line(base, "initial", "initial = 15, -5"),
              "initial needs x, y, theta");
  throws_with(base + "just a line\n", "expected 'key = value'");
  throws_with(base + "field.slope = 1\n", "not valid for field.kind 'circular_exp'");
  throws_with(base + "sweep.parameter = c1\n", "must appear together");
  throws_with(base + "sweep.parameter = s_d\nsweep.values = 1\n",
              "sweep.parameter must be one of c1, c2, c3, c4, c5, v, dt");
  throws_with(base + "bounds.min = 0, 0\nbounds.max = -1, 5\nbounds.step = 1\n",
              "bounds.max must not be below bounds.min");
  throws_with(with_line(base, "dt", "dt = -0.5"), "dt must be positive");
  throws_with(with_line(base, "name", "name ="), "empty value for key 'name'");
  throws_with(with_line(base, "v = 0.5", "v = fast"), "not a number: 'fast'");
  throws_with(with_line(base, "v = 0.5", "v = 0.5x"), "trailing junk after number");
  throws_with(base + "field.log = maybe\n", "field.log must be true or false");
  throws_with(with_line(base, "initial", "initial = 1, 2, 3, -1"),
              "initial speed must be non-negative");
  throws_with(with_line(base, "field.center", "field.center = 5"),
              "expected two comma-separated numbers");
  throws_with(with_line(base, "field.kind", "field.kind = cubic"),
              "unknown field.kind 'cubic'");

  // The error prefix carries the source name and a line number.
  try {
    parse_scenario(base + "bogus = 1\n", "file.scn");
    FAIL("expected a parse error");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).rfind("file.scn:12:", 0) == 0);
  }
}

TEST_CASE("parse -> serialize -> parse is the identity on a maximal scenario") {
  const std::string text =
      "name = maximal\n"
      "field.kind = multi_gaussian\n"
      "field.component = 20, 20, 20, 600\n"
      "field.component = 30, -30, -20, 400\n"
      "field.component = 10, -20, 30, 800\n"
      "field.log = true\n"
      "vehicle = single_integrator\n"
      "gains.c1 = 10\n"
      "gains.c2 = 0.25\n"
      "gains.c3 = 0.1\n"
      "gains.c4 = 1.5\n"
      "gains.c5 = 0.3\n"
      "v = 0.5\n"
      "s_d = 2.5\n"
      "dt = 0.002\n"
      "duration = 600\n"
      "sdot = oracle\n"
      "hold = continuous\n"
      "sgn_delta = 0.001\n"
      "settle_threshold = 0.02\n"
      "initial = 0, 20, -1.5707963267948966\n"
      "initial = 5, 5, 0.1, 0.75\n"
      "sweep.parameter = c3\n"
      "sweep.values = 0.05, 0.1, 0.2\n"
      "bounds.min = -40, -30\n"
      "bounds.max = 30, 40\n"
      "bounds.step = 0.25\n";
  const Scenario first = parse_scenario(text);
  const std::string canon = serialize_scenario(first);
  const Scenario second = parse_scenario(canon);
  CHECK(first == second);
  CHECK(serialize_scenario(second) == canon);

  REQUIRE(std::get<MultiGaussianSpec>(first.field).components.size() == 3);
  CHECK(first.log_field);
}

TEST_CASE("make_field instantiates each kind with correct values") {
  SUBCASE("exponential") {
    const auto field = make_field(parse_scenario(kMinimal));
    CHECK(field->value({15.0, 5.0}) ==
          doctest::Approx(11.036383235143269).epsilon(1e-15));
    CHECK(field->source() == Vec2{5.0, 5.0});
  }
  SUBCASE("log-wrapped exponential") {
    const auto field = make_field(parse_scenario(std::string(kMinimal) + "field.log = true\n"));
    CHECK(field->value({15.0, 5.0}) ==
          doctest::Approx(std::log(30.0) - 1.0).epsilon(1e-15));
  }
  SUBCASE("linear radial") {
    std::string text = with_line(kMinimal, "field.kind", "field.kind = linear_radial");
    text = with_line(text, "field.intensity", "field.level = 20");
    text = with_line(text, "field.decay", "field.slope = 1\nfield.radius = 5");
    const auto field = make_field(parse_scenario(text));
    CHECK(field->value({5.0, 13.0}) == doctest::Approx(17.0).epsilon(1e-15));
  }
  SUBCASE("gaussian sum") {
    std::string text = with_line(kMinimal, "field.kind", "field.kind = multi_gaussian");
    text = with_line(text, "field.intensity",
                     "field.component = 20, 20, 20, 600\n"
                     "field.component = 30, -30, -20, 400\n"
                     "field.component = 10, -20, 30, 800");
    text = with_line(text, "field.decay", "");
    text = with_line(text, "field.center", "");
    const auto field = make_field(parse_scenario(text));
    CHECK(field->value({0.0, 20.0}) ==
          doctest::Approx(15.678870289928575).epsilon(1e-15));
  }
}

TEST_CASE("grid scenarios resolve the data file next to the scenario") {
  const auto dir = scratch_dir();
  {
    std::ofstream grid(dir / "plume.grid");
    grid << "0,0,1,1,3,3\n"
            "1,2,3\n"
            "4,5,6\n"
            "7,8,9\n";
    std::ofstream scn(dir / "grid.scn");
    scn << "name = grid-demo\n"
           "field.kind = grid\n"
           "field.file = plume.grid\n"
           "gains.c1 = 1\n"
           "gains.c3 = 0.1\n"
           "v = 0.5\n"
           "s_d = 5\n"
           "duration = 1\n"
           "initial = 1, 1, 0\n";
  }
  const Scenario s = load_scenario(dir / "grid.scn");
  CHECK(s.name == "grid-demo");
  const auto field = make_field(s, dir);
  CHECK(field->value({1.0, 1.0}) == 5.0);
  CHECK(field->value({0.5, 0.5}) == doctest::Approx(3.0).epsilon(1e-15));

  CHECK_THROWS_WITH_AS(load_scenario(dir / "absent.scn"), Contains("cannot open"),
                       std::runtime_error);
}

TEST_CASE("make_sim_config copies the selected initial state and all settings") {
  std::string text(kMinimal);
  text += "initial = 9, 5, -1.5, 0.75\n";
  const Scenario s = parse_scenario(text);
  const SimConfig cfg = make_sim_config(s, 1);
  CHECK(cfg.vehicle == VehicleKind::dubins);
  CHECK(cfg.v == 0.5);
  CHECK(cfg.s_d == 20.0);
  CHECK(cfg.dt == 0.01);
  CHECK(cfg.duration == 120.0);
  CHECK(cfg.initial.p == Vec2{9.0, 5.0});
  CHECK(cfg.initial.speed == 0.75);
  CHECK(cfg.field != nullptr);
  CHECK_THROWS_AS(make_sim_config(s, 2), std::out_of_range);
}

TEST_CASE("radial view per field kind") {
  SUBCASE("linear radial passes slope and radius through") {
    std::string text = with_line(kMinimal, "field.kind", "field.kind = linear_radial");
    text = with_line(text, "field.intensity", "field.level = 20");
    text = with_line(text, "field.decay", "field.slope = 1\nfield.radius = 5");
    const auto view = radial_view(parse_scenario(text));
    REQUIRE(view.has_value());
    CHECK(view->alpha == 1.0);
    CHECK(view->r_d == 5.0);
    // The log of a linear profile is no longer linear in r.
    CHECK(!radial_view(parse_scenario(text + "field.log = true\n")).has_value());
  }
  SUBCASE("exponential: effective slope at the target isoline") {
    const auto view = radial_view(parse_scenario(kMinimal));
    REQUIRE(view.has_value());
    CHECK(view->alpha == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(view->r_d == doctest::Approx(4.0546510810816438).epsilon(1e-15));
  }
  SUBCASE("log-wrapped exponential: exact slope everywhere") {
    std::string text = with_line(kMinimal, "s_d", "s_d = 2");
    text += "field.log = true\n";
    const auto view = radial_view(parse_scenario(text));
    REQUIRE(view.has_value());
    CHECK(view->alpha == 0.1);
    CHECK(view->r_d == doctest::Approx((std::log(30.0) - 2.0) / 0.1).epsilon(1e-14));
    // A target at or above the peak has no isoline.
    CHECK_THROWS_AS(radial_view(parse_scenario(with_line(text, "s_d", "s_d = 4"))),
                    std::invalid_argument);
  }
  SUBCASE("exponential target outside (0, intensity) is rejected") {
    CHECK_THROWS_AS(radial_view(parse_scenario(with_line(kMinimal, "s_d", "s_d = 40"))),
                    std::invalid_argument);
    CHECK_THROWS_AS(radial_view(parse_scenario(with_line(kMinimal, "s_d", "s_d = -1"))),
                    std::invalid_argument);
  }
  SUBCASE("non-radial kinds have no radial view") {
    std::string text = with_line(kMinimal, "field.kind", "field.kind = multi_gaussian");
    text = with_line(text, "field.intensity", "field.component = 20, 20, 20, 600");
    text = with_line(text, "field.decay", "");
    text = with_line(text, "field.center", "");
    CHECK(!radial_view(parse_scenario(text)).has_value());
  }
}
