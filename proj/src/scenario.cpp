#include "dirac/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "dirac/error.hpp"
#include "dirac/fdtd.hpp"
#include "dirac/io.hpp"
#include "dirac/observables.hpp"
#include "dirac/spectral.hpp"

namespace dirac {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

// Axis along which the closed-form examples oscillate.
Axis zb_axis(Example e) { return e == Example::ii ? Axis::x : Axis::z; }

json fit_json(const ObservableSeries& v, Axis a) {
  json j;
  j["component"] = a == Axis::x ? "Vx" : (a == Axis::y ? "Vy" : "Vz");
  try {
    const ZbFit f = zb_fit(v, a);
    j["drift"] = f.drift;
    j["frequency"] = f.frequency;
    j["initial_amplitude"] = f.initial_amplitude;
    j["decay_time_10pct"] = f.decay_time(0.1);
  } catch (const InvalidInput& e) {
    j["skipped"] = e.what();
  }
  return j;
}

class Writer {
 public:
  Writer(const RunConfig& cfg, ScenarioOutcome& out) : cfg_(cfg), out_(out) {}

  void text(const std::string& rel, const std::string& body) {
    write_text_file((fs::path(out_.directory) / rel).string(), body);
    out_.files.push_back(rel);
  }
  void dump(const std::string& rel, const BispinorField& f) {
    write_field_dump(f, (fs::path(out_.directory) / rel).string());
    out_.files.push_back(rel);
  }
  void slice(const std::string& rel, SliceMatrix s) {
    s.params["d"] = format_real(cfg_.packet.d);
    s.params["delta"] = format_real(cfg_.packet.delta);
    s.params["k0"] = format_real(cfg_.packet.k0);
    s.params["run"] = cfg_.name;
    text(rel, export_slice(s));
  }

 private:
  const RunConfig& cfg_;
  ScenarioOutcome& out_;
};

// Dumps, slices and symmetry metrics for one snapshot.
json snapshot_outputs(const RunConfig& cfg, Writer& w, const std::string& sub, const BispinorField& f,
                      double requested) {
  json j;
  j["requested_time"] = requested;
  j["time"] = f.time;
  j["norm"] = f.norm();
  j["mean_position"] = vec_json(mean_position(f));
  const std::string tag = time_tag(requested);
  if (cfg.dumps) {
    const std::string rel = sub + "/field_t" + tag + ".dfd";
    w.dump(rel, f);
    j["dump"] = rel;
  }
  const ScalarField rho = probability_density(f);
  json sym;
  sym["axial_interpolated"] = symmetry_metric(rho, SymmetryKind::axial);
  sym["z_parity"] = symmetry_metric(rho, SymmetryKind::z_parity);
  sym["xy_parity"] = symmetry_metric(rho, SymmetryKind::xy_parity);
  j["symmetry"] = sym;

  if (!cfg.slices.empty()) {
    bool need_spin = false;
    for (const auto& q : cfg.slice_fields) need_spin |= q != "density";
    SpinDensityField spin;
    if (need_spin) spin = spin_density(f);
    json files = json::array();
    for (const std::string& p : cfg.slices) {
      const PlaneSpec plane = PlaneSpec::parse(p);
      for (const std::string& q : cfg.slice_fields) {
        const ScalarField& src = q == "density" ? rho : (q == "spin_x" ? spin.sx : (q == "spin_y" ? spin.sy : spin.sz));
        SliceMatrix s = extract_slice(src, plane, q);
        s.time = f.time;
        const std::string rel = sub + "/" + q + "_" + plane.label() + "_t" + tag + ".txt";
        w.slice(rel, std::move(s));
        files.push_back(rel);
      }
    }
    j["slices"] = files;
  }
  return j;
}

void run_spectral(const RunConfig& cfg, const BispinorField& initial, Writer& w, json& rep,
                  const std::vector<double>& times, std::ostream& log) {
  const std::string sub = "spectral";
  SpectralEvolver ev(initial);
  rep["nyquist_fraction"] = ev.nyquist_fraction();
  if (cfg.series && !times.empty()) {
    ObservableSeries v{"velocity", Provenance::grid_moment, {}, {}};
    ObservableSeries s{"spin", Provenance::grid_moment, {}, {}};
    std::vector<double> norms;
    for (double t : times) {
      const GridMoments m = spectral_moments(ev, t);
      v.times.push_back(t);
      s.times.push_back(t);
      v.values.push_back(m.velocity);
      s.values.push_back(m.spin);
      norms.push_back(m.norm);
    }
    w.text(sub + "/series.csv", series_csv(v, s, norms));
    rep["series"] = sub + "/series.csv";
    const Example ex = classify(cfg.polarization);
    rep["zb_fit"] = fit_json(v, zb_axis(ex));
    log << "spectral: " << times.size() << " series samples\n";
  }
  json snaps = json::array();
  for (double t : cfg.snapshots) {
    BispinorField f = ev.position_field(t);
    f.time = t;
    json j = snapshot_outputs(cfg, w, sub, f, t);
    j["symmetry"]["axial_band_limited_z0"] = axial_metric_spectral(ev, t, f.grid.nearest(Axis::z, 0.0));
    if (cfg.cylindrical) {
      const PositionGrid& g = f.grid;
      std::vector<double> rho, z;
      for (std::size_t i = 0; i < g.nx / 2; ++i) rho.push_back(static_cast<double>(i) * g.dx);
      for (std::size_t k = 0; k < g.nz; ++k) z.push_back(g.z(k));
      const CylindricalField c = synthesize_cylindrical(cfg.state(), rho, z, t);
      SliceMatrix s = cylindrical_slice(c);
      const std::string rel = sub + "/cylindrical_t" + time_tag(t) + ".txt";
      w.slice(rel, std::move(s));
      j["cylindrical"] = rel;
      j["cylindrical_error_estimate"] = c.error_estimate;
    }
    snaps.push_back(j);
    log << "spectral: snapshot t = " << t << "\n";
  }
  rep["snapshots"] = snaps;
}

void run_fdtd(const RunConfig& cfg, const BispinorField& initial, Writer& w, json& rep,
              const std::vector<double>& times, std::ostream& log) {
  const std::string sub = "fdtd";
  const double dt = cfg.dt;
  const double edge0 = boundary_mass_fraction(initial);
  if (edge0 >= 1e-6)
    throw ConfigError("initial packet touches the walls: boundary mass fraction " + format_real(edge0) +
                      "; enlarge the lattice");
  auto step_of = [&](double t) { return static_cast<std::size_t>(std::llround(t / dt)); };
  const std::size_t n_steps = step_of(cfg.t_end);
  rep["dt"] = dt;
  rep["steps"] = n_steps;

  LeapFrogState st = make_leapfrog(initial, dt, cfg.bootstrap);
  ObservableSeries v{"velocity", Provenance::grid_moment, {}, {}};
  ObservableSeries s{"spin", Provenance::grid_moment, {}, {}};
  std::vector<double> norms;
  std::size_t next_sample = 0;
  json snaps = json::array();
  bool reflected = false;
  std::size_t reflection_step = 0;
  double max_dev = 0.0;

  // psi_prev holds the field at step_count * dt.
  auto visit = [&]() {
    const std::size_t k = st.step_count;
    const BispinorField& f = st.psi_prev;
    while (cfg.series && next_sample < times.size() && step_of(times[next_sample]) == k) {
      const GridMoments m = grid_moments(f);
      const double t = static_cast<double>(k) * dt;
      if (v.times.empty() || t > v.times.back()) {
        v.times.push_back(t);
        s.times.push_back(t);
        v.values.push_back(m.velocity);
        s.values.push_back(m.spin);
        norms.push_back(m.norm);
      }
      ++next_sample;
    }
    for (double t : cfg.snapshots)
      if (step_of(t) == k) {
        BispinorField snap = f;
        snap.time = static_cast<double>(k) * dt;
        snaps.push_back(snapshot_outputs(cfg, w, sub, snap, t));
        log << "fdtd: snapshot t = " << snap.time << " (step " << k << ")\n";
      }
  };
  visit();
  try {
    for (std::size_t n = 0; n < n_steps; ++n) {
      step(st, 1e-3);
      max_dev = std::max(max_dev, std::abs(st.norm_history.back() / st.reference_norm - 1.0));
      if (!reflected && st.boundary_fraction > 1e-6) {
        reflected = true;
        reflection_step = st.step_count;
        log << "fdtd: packet reached the walls at step " << reflection_step << "\n";
      }
      visit();
    }
  } catch (...) {
    rep["snapshots"] = snaps;
    throw;
  }
  rep["snapshots"] = snaps;
  rep["max_norm_deviation"] = max_dev;
  rep["reflection_flag"] = reflected;
  if (reflected) rep["reflection_step"] = reflection_step;
  if (cfg.series && !v.times.empty()) {
    w.text(sub + "/series.csv", series_csv(v, s, norms));
    rep["series"] = sub + "/series.csv";
    rep["zb_fit"] = fit_json(v, zb_axis(classify(cfg.polarization)));
  }
}

}  // namespace

std::vector<double> sample_times(double t_end, double interval) {
  std::vector<double> t;
  if (!(interval > 0.0)) throw InvalidInput("sample interval must be positive");
  const auto n = static_cast<std::size_t>(std::floor(t_end / interval + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) t.push_back(static_cast<double>(k) * interval);
  return t;
}

std::string oracle_series_csv(const RunConfig& cfg) {
  const Example ex = classify(cfg.polarization);
  if (ex == Example::none)
    throw ConfigError("the quadrature series needs the (1,0,1,0) or (1,0,0,1) polarization");
  if (cfg.packet.m_axial != 0) throw ConfigError("the quadrature series needs packet.m_axial = 0");
  const std::vector<double> times = sample_times(cfg.t_end, cfg.sample_interval);
  const ObservableSeries v = velocity_oracle_series(cfg.packet, ex, times);
  const ObservableSeries s = spin_oracle_series(cfg.packet, ex, times);
  return series_csv(v, s);
}

std::string wsplit_csv(const RunConfig& cfg) {
  if (cfg.packet.m_axial != 0) throw ConfigError("W+- curves need packet.m_axial = 0");
  return wcurve_csv(w_curve(cfg.state(), default_pz_samples(cfg.packet)));
}

ScenarioOutcome run_scenario(const RunConfig& cfg, std::ostream& log) {
  ScenarioOutcome out;
  out.directory = cfg.directory;
  fs::create_directories(cfg.directory);
  set_worker_count(cfg.workers);
  Writer w(cfg, out);
  w.text("config.toml", to_text(cfg));

  json rep;
  rep["run"] = cfg.name;
  rep["engine"] = engine_name(cfg.engine);
  rep["packet"] = {{"d", cfg.packet.d}, {"delta", cfg.packet.delta}, {"k0", cfg.packet.k0},
                   {"m_axial", cfg.packet.m_axial}};
  const Example ex = classify(cfg.polarization);
  rep["polarization_family"] = ex == Example::i ? "i" : (ex == Example::ii ? "ii" : "general");
  rep["partial"] = false;
  const std::vector<double> times = sample_times(cfg.t_end, cfg.sample_interval);

  auto finish = [&]() {
    out.report_path = (fs::path(cfg.directory) / "report.json").string();
    write_text_file(out.report_path, rep.dump(2) + "\n");
    out.files.push_back("report.json");
  };

  try {
    // Drift velocity from the polarization alone.
    if (cfg.packet.m_axial == 0) {
      const MomentumQuadrature rule = MomentumQuadrature::for_packet(cfg.packet, 0.0);
      json drift;
      for (Axis a : {Axis::x, Axis::y, Axis::z}) {
        const DriftVelocity dv = drift_velocity_general(cfg.polarization, rule, a);
        drift[a == Axis::x ? "x" : (a == Axis::y ? "y" : "z")] = {
            {"total", dv.total},
            {"initial_velocity_term", dv.initial_velocity_term},
            {"mass_term", dv.mass_term},
            {"cross_term", dv.cross_term},
            {"via_coefficients", dv.via_coefficients}};
      }
      rep["drift_velocity"] = drift;
    }

    if (cfg.series && cfg.oracle && ex != Example::none && cfg.packet.m_axial == 0) {
      const ObservableSeries v = velocity_oracle_series(cfg.packet, ex, times);
      const ObservableSeries s = spin_oracle_series(cfg.packet, ex, times);
      w.text("oracle_series.csv", series_csv(v, s));
      json o;
      o["series"] = "oracle_series.csv";
      o["zb_fit"] = fit_json(v, zb_axis(ex));
      if (ex == Example::ii) o["zb_fit_vy"] = fit_json(v, Axis::y);
      rep["oracle"] = o;
      log << "oracle: " << times.size() << " series samples\n";
    }

    if (cfg.wsplit) {
      const WCurve c = w_curve(cfg.state(), default_pz_samples(cfg.packet));
      w.text("wsplit.csv", wcurve_csv(c));
      double neg = 0.0, tot = 0.0;
      for (std::size_t n = 0; n < c.pz.size(); ++n) {
        const double m = c.w_plus[n] + c.w_minus[n];
        tot += m;
        if (c.pz[n] < 0.0) neg += m;
      }
      rep["wsplit"] = {{"file", "wsplit.csv"},
                       {"integral", w_curve_total(c)},
                       {"negative_pz_fraction", tot > 0.0 ? neg / tot : 0.0}};
      log << "wsplit: " << c.pz.size() << " samples\n";
    }

    if (cfg.engine != Engine::none) {
      const SampledState s0 = initial_bispinor_field(cfg.state(), cfg.grid());
      require_resolved(s0);
      rep["initial_discrete_norm"] = s0.discrete_norm;
      if (cfg.uses_spectral()) {
        fs::create_directories(fs::path(cfg.directory) / "spectral");
        json r;
        try {
          run_spectral(cfg, s0.field, w, r, times, log);
        } catch (...) {
          rep["spectral"] = r;
          throw;
        }
        rep["spectral"] = r;
      }
      if (cfg.uses_fdtd()) {
        fs::create_directories(fs::path(cfg.directory) / "fdtd");
        json r;
        try {
          run_fdtd(cfg, s0.field, w, r, times, log);
        } catch (...) {
          rep["fdtd"] = r;
          throw;
        }
        rep["fdtd"] = r;
      }
    }
  } catch (const std::exception& e) {
    rep["partial"] = true;
    rep["error"] = e.what();
    out.partial = true;
    finish();
    throw;
  }
  finish();
  return out;
}

}  // namespace dirac
