// diracsim: command-line driver for the free Dirac wave-packet engines.
//
//   diracsim validate --preset fig1a
//   diracsim run --config my.toml --set grid.n=96 --set output.directory=out/a
//   diracsim slice out/fig1a/spectral/field_t7.5.dfd --plane z=0 --quantity spin_z
//   diracsim series --preset fig4 --out fig4.csv
//   diracsim wsplit --preset fig2a
//   diracsim report out/fig1a
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirac/config.hpp"
#include "dirac/error.hpp"
#include "dirac/io.hpp"
#include "dirac/observables.hpp"
#include "dirac/scenario.hpp"

namespace {

struct Source {
  std::string preset;
  std::string config;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    auto* p = cmd->add_option("--preset", preset, "built-in preset name");
    auto* c = cmd->add_option("--config", config, "run-config file");
    p->excludes(c);
    cmd->add_option("--set", sets, "override a key, e.g. --set grid.n=96")->allow_extra_args(false);
  }

  dirac::RunConfig load(bool norm_gate) const {
    std::string text;
    if (!preset.empty())
      text = dirac::preset_text(preset);
    else if (!config.empty())
      text = dirac::read_text_file(config);
    else
      throw dirac::ConfigError("give --preset NAME or --config FILE");
    return dirac::parse_config(text, sets, norm_gate);
  }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    dirac::write_text_file(out, text);
}

void print_report(const std::string& dir) {
  const auto rep = nlohmann::json::parse(dirac::read_text_file(dir + "/report.json"));
  std::cout << "run " << rep.value("run", "?") << " (engine " << rep.value("engine", "?") << ")";
  if (rep.value("partial", false)) std::cout << "  PARTIAL: " << rep.value("error", "");
  std::cout << "\n";
  if (rep.contains("drift_velocity"))
    for (const char* a : {"x", "y", "z"})
      std::cout << "  drift velocity " << a << ": " << rep["drift_velocity"][a]["total"].get<double>() << "\n";
  auto fit = [](const std::string& who, const nlohmann::json& f) {
    if (f.contains("skipped")) {
      std::cout << "  " << who << " " << f["component"].get<std::string>() << " fit skipped: "
                << f["skipped"].get<std::string>() << "\n";
      return;
    }
    std::cout << "  " << who << " " << f["component"].get<std::string>() << ": drift " << f["drift"].get<double>()
              << ", frequency " << f["frequency"].get<double>() << ", 10% decay time "
              << f["decay_time_10pct"].get<double>() << "\n";
  };
  if (rep.contains("oracle")) fit("oracle", rep["oracle"]["zb_fit"]);
  if (rep.contains("oracle") && rep["oracle"].contains("zb_fit_vy")) fit("oracle", rep["oracle"]["zb_fit_vy"]);
  if (rep.contains("wsplit"))
    std::cout << "  W+- integral " << rep["wsplit"]["integral"].get<double>() << ", negative-pz fraction "
              << rep["wsplit"]["negative_pz_fraction"].get<double>() << "\n";
  for (const char* eng : {"spectral", "fdtd"}) {
    if (!rep.contains(eng)) continue;
    const auto& e = rep[eng];
    if (e.contains("zb_fit")) fit(eng, e["zb_fit"]);
    if (e.contains("max_norm_deviation"))
      std::cout << "  " << eng << " max norm deviation " << e["max_norm_deviation"].get<double>()
                << (e.value("reflection_flag", false) ? " (reached walls)" : "") << "\n";
    if (e.contains("snapshots"))
      for (const auto& s : e["snapshots"]) {
        std::cout << "  " << eng << " t = " << s["time"].get<double>() << ": norm " << s["norm"].get<double>()
                  << ", axial " << s["symmetry"]["axial_interpolated"].get<double>() << ", z-parity "
                  << s["symmetry"]["z_parity"].get<double>() << ", xy-parity "
                  << s["symmetry"]["xy_parity"].get<double>();
        if (s["symmetry"].contains("axial_band_limited_z0"))
          std::cout << ", axial (band-limited, z=0) " << s["symmetry"]["axial_band_limited_z0"].get<double>();
        std::cout << "\n";
      }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free Dirac wave-packet simulator"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-presets", list, "print the built-in preset names");

  Source vsrc, rsrc, ssrc, wsrc;
  bool quiet = false;
  auto* validate = app.add_subcommand("validate", "check a configuration and print it with defaults resolved");
  vsrc.attach(validate);
  validate->add_flag("--quiet", quiet, "do not print the resolved configuration");

  std::string out_dir;
  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  rsrc.attach(run);
  run->add_option("--out", out_dir, "output directory (overrides output.directory)");

  std::string dump, plane = "z=0", quantity = "density", slice_out;
  auto* slice = app.add_subcommand("slice", "export a plane of a field dump as a text matrix");
  slice->add_option("dump", dump, "field dump file")->required();
  slice->add_option("--plane", plane, "plane, e.g. z=0");
  slice->add_option("--quantity", quantity, "density, spin_x, spin_y or spin_z")
      ->check(CLI::IsMember({"density", "spin_x", "spin_y", "spin_z"}));
  slice->add_option("--out", slice_out, "output file (default stdout)");

  std::string series_out;
  auto* series = app.add_subcommand("series", "quadrature velocity and spin series as CSV");
  ssrc.attach(series);
  series->add_option("--out", series_out, "output file (default stdout)");

  std::string w_out;
  auto* wsplit = app.add_subcommand("wsplit", "W+- momentum distributions as CSV");
  wsrc.attach(wsplit);
  wsplit->add_option("--out", w_out, "output file (default stdout)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize report.json of a finished run");
  report->add_option("directory", report_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list) {
      for (const auto& n : dirac::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const dirac::RunConfig cfg = vsrc.load(true);
      if (!quiet) std::cout << dirac::to_text(cfg);
      std::cerr << "configuration valid\n";
    } else if (run->parsed()) {
      if (!out_dir.empty()) rsrc.sets.push_back("output.directory=" + out_dir);
      const dirac::RunConfig cfg = rsrc.load(true);
      const auto outcome = dirac::run_scenario(cfg, std::cerr);
      for (const auto& f : outcome.files) std::cout << outcome.directory << "/" << f << "\n";
    } else if (slice->parsed()) {
      const dirac::BispinorField f = dirac::read_field_dump(dump);
      dirac::ScalarField field;
      if (quantity == "density") {
        field = dirac::probability_density(f);
      } else {
        const auto s = dirac::spin_density(f);
        field = quantity == "spin_x" ? s.sx : (quantity == "spin_y" ? s.sy : s.sz);
      }
      emit(slice_out, dirac::export_slice(dirac::extract_slice(field, dirac::PlaneSpec::parse(plane), quantity)));
    } else if (series->parsed()) {
      emit(series_out, dirac::oracle_series_csv(ssrc.load(false)));
    } else if (wsplit->parsed()) {
      emit(w_out, dirac::wsplit_csv(wsrc.load(false)));
    } else if (report->parsed()) {
      print_report(report_dir);
    } else {
      std::cout << app.help();
    }
  } catch (const dirac::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const dirac::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
