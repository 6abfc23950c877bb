#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "dirac/config.hpp"
#include "dirac/error.hpp"

using namespace dirac;

namespace {

const char* kMinimal = R"(
[run]
engine = "spectral"
[packet]
d = 1
delta = 5
polarization = [1, 0, 0, 0, 1, 0, 0, 0]
)";

std::string error_of(const std::string& text, const std::vector<std::string>& sets = {}) {
  try {
    parse_config(text, sets);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("document parser") {
  const ConfigDocument d = parse_document("# c\n[a]\nx = 1.5  # trailing\ny = \"s # not a comment\"\nz = true\nw = [1, -2e-1, \"q\"]\n");
  CHECK(std::get<double>(d.at("a.x").v) == 1.5);
  CHECK(std::get<std::string>(d.at("a.y").v) == "s # not a comment");
  CHECK(std::get<bool>(d.at("a.z").v));
  const auto& arr = std::get<ConfigValue::Array>(d.at("a.w").v);
  REQUIRE(arr.size() == 3);
  CHECK(std::get<double>(arr[1]) == -0.2);
  CHECK(d.at("a.w").line == 6);

  CHECK_THROWS_AS(parse_document("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK(contains(error_of(std::string("stray = 1\n") + kMinimal), "unknown key stray"));
  CHECK_THROWS_AS(parse_document("[a]\nx = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_document("[a]\nx = \"open\n"), ConfigError);
}

TEST_CASE("defaults of a minimal configuration") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.engine == Engine::spectral);
  CHECK(c.nx == 128);
  CHECK(c.spacing == 0.5);
  CHECK(c.packet.k0 == 0.0);
  CHECK(c.packet.m_axial == 0);
  CHECK(c.bootstrap == Bootstrap::discrete_eigen);
  CHECK(c.dt_auto);
  CHECK(c.dt == doctest::Approx(0.5 * max_stable_dt(0.5)).epsilon(1e-15));
  CHECK(c.sample_interval == 0.25);
  CHECK(c.slice_fields == std::vector<std::string>{"density"});
  CHECK(c.grid().dx == 0.5);
  CHECK(classify(c.state().phi()) == Example::i);
}

TEST_CASE("gates and malformed input") {
  // Stability gate, with the margin and the largest stable step in the message.
  const std::string stab = error_of(kMinimal, {"run.engine=fdtd", "grid.dt=0.2"});
  CHECK(contains(stab, "stability gate"));
  CHECK(contains(stab, "-0.12"));
  CHECK(contains(stab, "0.117041"));
  // The spectral engine has no time step, so no gate.
  CHECK(error_of(kMinimal, {"grid.dt=0.2"}).empty());

  CHECK(contains(error_of(kMinimal, {"grid.spacing=1.2"}), "resolution gate"));
  CHECK(contains(error_of(kMinimal, {"packet.polarization=[0,0,0,0,0,0,0,0]"}), "zero norm"));
  CHECK(contains(error_of(kMinimal, {"packet.polarization=[1,0,0]"}), "8 numbers"));
  CHECK(contains(error_of(kMinimal, {"grid.colour=3"}), "unknown key grid.colour"));
  CHECK(contains(error_of("[run]\nengine = \"spectral\"\n[packet]\nd = 1\npolarization = [1,0,0,0,0,0,0,0]\n"),
                 "packet.delta"));
  CHECK(contains(error_of(kMinimal, {"run.engine=warp"}), "run.engine"));
  CHECK(contains(error_of(kMinimal, {"schedule.t_end=1", "schedule.snapshots=[2]"}), "outside"));
  CHECK(contains(error_of(kMinimal, {"output.slices=[\"q=1\"]"}), "output.slices"));
  CHECK(contains(error_of(kMinimal, {"packet.m_axial=1", "output.wsplit=true"}), "m_axial"));
  CHECK(contains(error_of(kMinimal, {"novalue"}), "section.key=value"));

  // Norm gate: a box that cuts the packet off.
  const RunConfig small = parse_config(kMinimal, {"grid.n=16"});
  CHECK_THROWS_AS(check_norm_gate(small), ConfigError);
}

TEST_CASE("overrides and the resolved echo") {
  const RunConfig c = parse_config(kMinimal, {"grid.n=96", "run.engine=both", "run.name=abc", "grid.bootstrap=taylor2"});
  CHECK(c.nx == 96);
  CHECK(c.engine == Engine::both);
  CHECK(c.name == "abc");
  CHECK(c.directory == "out/abc");
  CHECK(c.bootstrap == Bootstrap::taylor2);

  const std::string echo = to_text(c);
  const RunConfig back = parse_config(echo);
  CHECK(to_text(back) == echo);
  CHECK(back.dt == c.dt);
  CHECK(back.packet.d == c.packet.d);
}

TEST_CASE("presets") {
  const auto names = preset_names();
  for (const char* n : {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(preset_text("fig99"), ConfigError);

  for (const auto& n : names) {
    CAPTURE(n);
    const RunConfig c = parse_config(preset_text(n));
    CHECK(c.name == n);
    // The embedded copy equals the shipped file.
    std::ifstream in(std::string(DIRAC_SOURCE_DIR) + "/presets/" + n + ".toml", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == preset_text(n));
  }

  auto check_packet = [](const std::string& n, double d, double delta, double k0, Example ex) {
    CAPTURE(n);
    const RunConfig c = parse_config(preset_text(n));
    CHECK(c.packet.d == d);
    CHECK(c.packet.delta == delta);
    CHECK(c.packet.k0 == k0);
    CHECK(classify(c.polarization) == ex);
  };
  check_packet("fig1a", 1, 5, 0, Example::i);
  check_packet("fig1b", 5, 5, 0, Example::i);
  check_packet("fig2a", 1, 5, 0, Example::i);
  check_packet("fig2b", 5, 5, 1, Example::i);
  check_packet("fig3a", 1, 5, 0, Example::ii);
  check_packet("fig3b", 2.5, 5, 1, Example::ii);
  check_packet("fig4", 1, 5, 0, Example::ii);
  check_packet("fig5", 2.5, 5, 1, Example::ii);
  check_packet("fig6", 1, 5, 0, Example::i);
  check_packet("fig7", 3.64, 3.64, 1, Example::ii);

  CHECK(parse_config(preset_text("fig3a")).snapshots.at(0) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
  CHECK(parse_config(preset_text("fig6")).slice_fields.size() == 3);
}
