#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"
#include "cascade/rates.hpp"
#include "oracles.hpp"

using namespace cascade;

namespace {

Species mg() { return load_species("Mg"); }

}  // namespace

TEST_CASE("no drive, no scattering") {
  Species s = mg();
  RatePoint pt = scattering_rates(s, {0, 5 * s.gamma2, 0.2 * s.gamma1, 0}, 1.0);
  CHECK(std::abs(pt.r1) < 1e-12);
  CHECK(std::abs(pt.r2) < 1e-12);
}

TEST_CASE("upper-transition rate vanishes without the second laser or decay") {
  Species s = mg();
  CHECK(rate_r2_obe(s, {0.02 * s.gamma1, 0, -0.3 * s.gamma1, 0}, 2.0) == 0.0);
  Species s0 = s.with_gamma2(0.0);
  const double g2_unit = two_pi * 2.0e6;
  CHECK(rate_r2_obe(s0, {0.02 * s.gamma1, 8 * g2_unit, 0.1 * s.gamma1, 3 * g2_unit}, 2.0) == 0.0);
}

TEST_CASE("two-level rate matches the saturation Lorentzian oracle") {
  Species s = mg();
  const double omega1 = 0.01 * s.gamma1;
  for (double d1 : {-0.5 * s.gamma1, 0.0, 1.2 * s.gamma1}) {
    for (double v : {0.0, 4.0, -9.0}) {
      const double expected =
          s.gamma1 * oracles::two_level_rho11(omega1, d1 - s.k1 * v, s.gamma1);
      CHECK(rate_r1_obe(s, {omega1, 0, d1, 0}, v) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("exact dark resonance suppresses the lower-transition rate") {
  Species s = mg().with_gamma2(0.0);
  const double g2_unit = two_pi * 2.0e6;
  LaserConfig cfg{0.01 * s.gamma1, 10 * g2_unit, 0, -20 * g2_unit};
  cfg.delta1 = -cfg.delta2;  // two-photon resonance at v = 0
  const double dark = rate_r1_obe(s, cfg, 0.0);

  // off-resonance peak over a coarse delta1 sweep
  double peak = 0;
  for (int i = 0; i <= 60; ++i) {
    LaserConfig probe = cfg;
    probe.delta1 = -1.5 * s.gamma1 + 3.0 * s.gamma1 * i / 60;
    peak = std::max(peak, rate_r1_obe(s, probe, 0.0));
  }
  CHECK(dark <= 1e-8 * peak);
}

TEST_CASE("perturbative rate closed forms") {
  Species s = mg();
  const double omega1 = 0.01 * s.gamma1;
  SUBCASE("resonant two-level limit") {
    const double r = rate_r1_perturbative(s, {omega1, 0, 0, 0}, 0.0);
    CHECK(r == doctest::Approx(omega1 * omega1 / (2 * s.gamma1)).epsilon(1e-12));
  }
  SUBCASE("exact zero at the two-photon resonance when the top state is stable") {
    Species s0 = s.with_gamma2(0.0);
    LaserConfig cfg{omega1, 5 * s.gamma2, 0.7 * s.gamma1, -0.7 * s.gamma1};
    CHECK(rate_r1_perturbative(s0, cfg, 0.0) == 0.0);
  }
  SUBCASE("asymmetric structure across the two-photon resonance") {
    // intermediate level far detuned so the one-photon background is flat
    LaserConfig cfg{omega1, 10 * s.gamma2, -2.0 * s.gamma1, 20 * s.gamma2};
    const double v_res = (cfg.delta1 + cfg.delta2) / (s.k1 + s.k2);
    double best_v = 0, worst_v = 0, best = -1, worst = 1e300;
    for (int i = 0; i <= 4000; ++i) {
      const double v = v_res + (i - 2000) * 5e-5 * s.gamma1 / s.k1;
      const double r = rate_r1_perturbative(s, cfg, v);
      if (r > best) { best = r; best_v = v; }
      if (r < worst) { worst = r; worst_v = v; }
    }
    CHECK((best_v - v_res) * (worst_v - v_res) < 0);  // extrema straddle the resonance
    CHECK(best > 3 * worst);                          // and the structure is deep
  }
}

TEST_CASE("perturbative drive guard") {
  Species s = mg();
  CHECK(perturbative_drive_ok(s, {0.01 * s.gamma1, 0, 0, 0}));
  CHECK_FALSE(perturbative_drive_ok(s, {0.2 * s.gamma1, 0, 0, 0}));
}

TEST_CASE("both rate routes agree after one scale constant when the top state is stable") {
  Species phys = mg();
  const double omega1 = 0.01 * phys.gamma1;

  // frozen scale at the reference point (resonant two-level, v = 0)
  const double scale = rate_r1_obe(phys, {omega1, 0, 0, 0}, 0.0) /
                       rate_r1_perturbative(phys, {omega1, 0, 0, 0}, 0.0);
  CHECK(scale == doctest::Approx(2.0).epsilon(1e-3));

  Species s0 = phys.with_gamma2(0.0);
  const double g2_unit = two_pi * 2.0e6;
  LaserConfig cfg{omega1, 10 * g2_unit, 0.5 * phys.gamma1, -20 * g2_unit};
  double peak = 0;
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i <= 80; ++i) {
    const double v = -2 * phys.gamma1 / phys.k1 + 4.0 * phys.gamma1 / phys.k1 * i / 80;
    const double obe = rate_r1_obe(s0, cfg, v);
    const double pert = rate_r1_perturbative(s0, cfg, v);
    samples.emplace_back(obe, pert);
    peak = std::max(peak, std::abs(obe));
  }
  for (auto [obe, pert] : samples) {
    CHECK(std::abs(scale * pert - obe) <= 0.01 * std::max(std::abs(obe), 1e-6 * peak));
  }
}

TEST_CASE("rates obey the conjugation mirror") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 10 * s.gamma2, 0.5 * s.gamma1, -20 * s.gamma2};
  LaserConfig mir = cfg;
  mir.delta1 = -cfg.delta1;
  mir.delta2 = -cfg.delta2;
  for (double v : {0.0, 1.7, -6.3}) {
    RatePoint a = scattering_rates(s, cfg, v);
    RatePoint b = scattering_rates(s, mir, -v);
    CHECK(a.r1 == doctest::Approx(b.r1).epsilon(1e-9));
    CHECK(a.r2 == doctest::Approx(b.r2).epsilon(1e-9));
    CHECK(rate_r1_perturbative(s, cfg, v) ==
          doctest::Approx(rate_r1_perturbative(s, mir, -v)).epsilon(1e-12));
  }
}

TEST_CASE("weak-field rates scale quadratically in the probe drive") {
  Species s = mg();
  LaserConfig a{0.01 * s.gamma1, 10 * s.gamma2, 0.51 * s.gamma1, -20 * s.gamma2};
  LaserConfig b = a;
  b.omega1 /= 2;
  for (double v : {0.0, 2.0}) {
    CHECK(rate_r1_obe(s, a, v) / rate_r1_obe(s, b, v) == doctest::Approx(4.0).epsilon(0.01));
    CHECK(rate_r1_perturbative(s, a, v) / rate_r1_perturbative(s, b, v) ==
          doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("far-detuned two-photon drive scatters mostly on the upper transition") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 50 * s.gamma2, -40 * s.gamma1, +40 * s.gamma1};
  RatePoint pt = scattering_rates(s, cfg, 0.0);
  CHECK(pt.r2 > 10 * pt.r1);
  CHECK(pt.r1 > 0);
}

TEST_CASE("rate positivity across a profile") {
  Species s = mg();
  LaserConfig cfg{0.02 * s.gamma1, 10 * s.gamma2, 0.5 * s.gamma1, -20 * s.gamma2};
  RateProfile profile = rate_profile(s, cfg, default_velocity_grid(s, cfg, 101));
  for (const RatePoint& pt : profile.points) {
    CHECK(pt.r2 >= 0.0);
    CHECK(pt.r1 >= -1e-12 * s.gamma1);
  }
}

TEST_CASE("absorption spectrum: two-level linewidth") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 0, 0, 0};
  std::vector<double> grid;
  for (int i = 0; i <= 800; ++i) grid.push_back(-2 * s.gamma1 + 4 * s.gamma1 * i / 800);
  auto spectrum = absorption_spectrum(s, cfg, grid);
  auto peak = std::max_element(spectrum.begin(), spectrum.end(),
                               [](auto& a, auto& b) { return a.r1 < b.r1; });
  CHECK(std::abs(peak->delta1) < 0.02 * s.gamma1);
  // full width at half maximum ~ gamma1 at low saturation
  const double half = peak->r1 / 2;
  double lo = 0, hi = 0;
  for (size_t i = 1; i < spectrum.size(); ++i) {
    if (spectrum[i - 1].r1 < half && spectrum[i].r1 >= half) lo = spectrum[i].delta1;
    if (spectrum[i - 1].r1 >= half && spectrum[i].r1 < half) hi = spectrum[i].delta1;
  }
  CHECK((hi - lo) / s.gamma1 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("absorption spectrum: coupling laser carves a moved minimum") {
  Species s = mg();
  std::vector<double> grid;
  for (int i = 0; i <= 1200; ++i) grid.push_back(-1.5 * s.gamma1 + 3 * s.gamma1 * i / 1200);

  auto minima_of = [&](double delta2_sign) {
    LaserConfig cfg{0.01 * s.gamma1, 10 * s.gamma2, 0, delta2_sign * 20 * s.gamma2};
    auto spec = absorption_spectrum(s, cfg, grid);
    std::vector<double> minima;
    for (size_t i = 1; i + 1 < spec.size(); ++i) {
      if (spec[i].r1 < spec[i - 1].r1 && spec[i].r1 < spec[i + 1].r1) {
        minima.push_back(spec[i].delta1 / s.gamma1);
      }
    }
    return minima;
  };

  auto neg = minima_of(-1);  // minimum mirrored to positive detuning
  REQUIRE(neg.size() == 1);
  CHECK(neg[0] > 0.4);
  CHECK(neg[0] < 0.6);

  auto pos = minima_of(+1);
  REQUIRE(pos.size() == 1);
  CHECK(pos[0] > -0.6);
  CHECK(pos[0] < -0.4);
}

TEST_CASE("force is antisymmetric with a vanishing origin") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 10 * s.gamma2, 0.52 * s.gamma1, -20 * s.gamma2};
  CHECK(force(s, cfg, 0.0) == 0.0);
  for (double v : {0.5, 2.0, 17.0}) {
    CHECK(force(s, cfg, -v) == -force(s, cfg, v));
  }
}

TEST_CASE("red-detuned two-level force damps inside the linewidth") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 0, -0.5 * s.gamma1, 0};
  for (double frac : {0.1, 0.3, 0.45}) {
    const double v = frac * s.gamma1 / (2 * s.k1);
    CHECK(v * force(s, cfg, v) < 0);
    CHECK(-v * force(s, cfg, -v) < 0);
    // sign agrees with the Lorentzian force oracle
    CHECK(force(s, cfg, v) * oracles::two_level_force(hbar, s.gamma1, cfg.omega1, cfg.delta1,
                                                      s.k1, v) > 0);
  }
}

TEST_CASE("default velocity grid switches regime on far detuning") {
  Species s = mg();
  LaserConfig eit{0.01 * s.gamma1, 10 * s.gamma2, 0.5 * s.gamma1, -20 * s.gamma2};
  CHECK(default_velocity_halfwidth(s, eit) == doctest::Approx(2 * s.gamma1 / s.k1));
  LaserConfig far{0.01 * s.gamma1, 50 * s.gamma2, -40 * s.gamma1, 40 * s.gamma1};
  CHECK(default_velocity_halfwidth(s, far) == doctest::Approx(4 * s.gamma2 / s.k2));
  auto grid = default_velocity_grid(s, eit);
  CHECK(grid.size() == 401);
  CHECK(grid.front() == -grid.back());
}

TEST_CASE("csv emitters carry the configuration and full precision") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 0, -0.5 * s.gamma1, 0};
  std::vector<double> grid{-1.0, 0.0, 1.0};
  auto pts = force_profile(s, cfg, grid);
  std::ostringstream out;
  write_rate_profile_csv(out, s, cfg, pts);
  const std::string text = out.str();
  CHECK(text.find("# species=Mg") == 0);
  CHECK(text.find("v_m_per_s,R1_per_s,R2_per_s,F_N") != std::string::npos);

  // the R1 column survives a parse round-trip at 12 significant digits
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);  // first data row (v = -1)
  const size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
  const double parsed = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
  CHECK(parsed == doctest::Approx(pts[0].r1).epsilon(1e-12));

  std::ostringstream sout;
  auto spec_pts = absorption_spectrum(s, cfg, grid);
  write_spectrum_csv(sout, s, cfg, spec_pts);
  CHECK(sout.str().find("delta1_rad_per_s,R1_per_s") != std::string::npos);
}

TEST_CASE("profiles reject bad grids") {
  Species s = mg();
  LaserConfig cfg{0.01 * s.gamma1, 0, 0, 0};
  std::vector<double> bad{0.0, 0.0, 1.0};
  CHECK_THROWS_AS(rate_profile(s, cfg, bad), invalid_argument_error);
  std::vector<double> empty;
  CHECK_THROWS_AS(rate_profile(s, cfg, empty), invalid_argument_error);
  CHECK_THROWS_AS(default_velocity_grid(s, cfg, 1), invalid_argument_error);
}
