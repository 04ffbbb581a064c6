#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"
#include "cascade/scan.hpp"

using namespace cascade;

namespace {

Species mg() { return load_species("Mg"); }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = std::string("scan_test_") + std::to_string(counter++) + ".cfg";
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("frequency suffix parsing") {
  Species s = mg();
  CHECK(parse_frequency("0.5g1", s) == 0.5 * s.gamma1);
  CHECK(parse_frequency("-20g2", s) == -20 * s.gamma2);
  CHECK(parse_frequency("39.4MHz", s) == doctest::Approx(two_pi * 39.4e6).epsilon(1e-15));
  CHECK(parse_frequency("  1.25e8 ", s) == 1.25e8);

  // a detuning written in either unit is the same number
  CHECK(parse_frequency("-0.5g1", s) == doctest::Approx(parse_frequency("-39.4MHz", s)).epsilon(1e-12));

  CHECK(parse_frequency("+0.5g1", s) == 0.5 * s.gamma1);

  CHECK_THROWS_AS(parse_frequency("abc", s), parse_error);
  CHECK_THROWS_AS(parse_frequency("g1", s), parse_error);
  CHECK_THROWS_AS(parse_frequency("0.5 g1", s), parse_error);
  CHECK_THROWS_AS(parse_frequency("", s), parse_error);
  CHECK_THROWS_AS(parse_frequency("1.2mhz", s), parse_error);
  CHECK_THROWS_AS(parse_frequency("0x10", s), parse_error);
  CHECK_THROWS_AS(parse_frequency("1,5", s), parse_error);
}

TEST_CASE("range parsing") {
  Species s = mg();
  FrequencyRange r = parse_frequency_range("-1.5g1:1.5g1:301", s);
  CHECK(r.start == -1.5 * s.gamma1);
  CHECK(r.stop == 1.5 * s.gamma1);
  CHECK(r.points == 301);
  CHECK_THROWS_AS(parse_frequency_range("1:2", s), parse_error);
  CHECK_THROWS_AS(parse_frequency_range("1:2:0", s), parse_error);
  CHECK_THROWS_AS(parse_frequency_range("1:2:2.5", s), parse_error);
  CHECK_THROWS_AS(parse_frequency_range("1:2:3:4", s), parse_error);
}

TEST_CASE("scan spec validation and axis handling") {
  Species s = mg();
  ScanSpec spec;
  spec.species_name = "Mg";
  spec.fixed = {0.01 * s.gamma1, 0, 0, 0};
  spec.axis = ScanAxis::delta1;
  spec.start = -s.gamma1;
  spec.stop = s.gamma1;
  spec.points = 5;
  CHECK_NOTHROW(spec.validate());

  auto values = spec.axis_values();
  REQUIRE(values.size() == 5);
  CHECK(values.front() == -s.gamma1);
  CHECK(values.back() == s.gamma1);

  spec.points = 1;
  CHECK_THROWS_AS(spec.validate(), invalid_argument_error);
  spec.points = 5;
  spec.stop = spec.start;
  CHECK_THROWS_AS(spec.validate(), invalid_argument_error);

  SUBCASE("two-photon axis derives delta2 from the fixed delta1") {
    ScanSpec tp = spec;
    tp.axis = ScanAxis::two_photon;
    tp.start = -4 * s.gamma2;
    tp.stop = 4 * s.gamma2;
    tp.points = 3;
    tp.fixed.delta1 = -40 * s.gamma1;
    LaserConfig at = tp.lasers_at(1.0e6);
    CHECK(at.delta1 == -40 * s.gamma1);
    CHECK(at.delta2 == 1.0e6 - (-40 * s.gamma1));
  }
  SUBCASE("omega2 axis must stay non-negative") {
    ScanSpec o2 = spec;
    o2.axis = ScanAxis::omega2;
    o2.start = -1.0;
    o2.stop = 1.0;
    CHECK_THROWS_AS(o2.validate(), invalid_argument_error);
  }
}

TEST_CASE("scan rows match individually computed reports") {
  Species s = mg();
  ScanSpec spec;
  spec.species_name = "Mg";
  spec.fixed = {0.01 * s.gamma1, 0, 0, 0};
  spec.axis = ScanAxis::delta1;
  spec.start = -1.0 * s.gamma1;
  spec.stop = 1.0 * s.gamma1;
  spec.points = 9;
  spec.outputs = {ScanOutput::absorption, ScanOutput::alpha, ScanOutput::temperature};

  auto rows = run_scan(spec, s, 1);
  REQUIRE(rows.size() == 9);
  for (const ScanRow& row : rows) {
    CHECK(row.error.empty());
    REQUIRE(row.report.has_value());
    // recompute independently
    CoolingReport direct = cooling_report(s, row.lasers, spec.geometry, false);
    CHECK(row.report->alpha == doctest::Approx(direct.alpha).epsilon(1e-12));
    CHECK(row.absorption.has_value());
    if (row.axis_value < 0) {
      CHECK(row.report->regime == Regime::cooling);
      REQUIRE(row.report->temperature.has_value());
      CHECK(*row.report->temperature ==
            doctest::Approx(*direct.temperature).epsilon(1e-12));
    }
    if (row.axis_value > 0) CHECK(row.report->regime == Regime::heating);
  }
}

TEST_CASE("scan output is independent of the thread count") {
  Species s = mg();
  ScanSpec spec;
  spec.species_name = "Mg";
  spec.fixed = {0.01 * s.gamma1, 10 * s.gamma2, 0, 20 * s.gamma2};
  spec.axis = ScanAxis::delta1;
  spec.start = -0.8 * s.gamma1;
  spec.stop = 0.8 * s.gamma1;
  spec.points = 21;
  spec.outputs = {ScanOutput::absorption, ScanOutput::alpha, ScanOutput::temperature};

  auto render = [&](int threads) {
    auto rows = run_scan(spec, s, threads);
    std::ostringstream out;
    write_scan_csv(out, spec, s, rows);
    return out.str();
  };
  const std::string one = render(1);
  CHECK(one == render(4));
  CHECK(one.find("# scan species=Mg axis=delta1") == 0);
  CHECK(one.find("delta1_rad_per_s,delta1,delta2,omega1,omega2,absorption_per_s,"
                 "alpha_per_s,H_watt,T_kelvin,regime,capture_mps,saturated,error") !=
        std::string::npos);
}

TEST_CASE("per-row failures are recorded and the scan continues") {
  // omega2 = 0 with a stable top state is singular; other rows are fine
  Species s = mg().with_gamma2(0.0);
  ScanSpec spec;
  spec.species_name = "Mg";
  spec.fixed = {0.01 * s.gamma1, 0, 0.2 * s.gamma1, -0.2 * s.gamma1};
  spec.axis = ScanAxis::omega2;
  spec.start = 0;
  spec.stop = 10 * two_pi * 2e6;
  spec.points = 5;
  spec.outputs = {ScanOutput::absorption};

  auto rows = run_scan(spec, s, 2);
  REQUIRE(rows.size() == 5);
  CHECK_FALSE(rows[0].error.empty());  // undriven upper transition: singular
  CHECK_FALSE(rows[0].absorption.has_value());
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].error.empty());
    CHECK(rows[i].absorption.has_value());
  }
  std::ostringstream out;
  write_scan_csv(out, spec, s, rows);
  CHECK(out.str().find("singular") != std::string::npos);
}

TEST_CASE("parallel_for visits every index exactly once") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) CHECK(h.load() == 1);
  // inline path
  std::vector<std::atomic<int>> one(3);
  parallel_for(one.size(), 1, [&](std::size_t i) { one[i].fetch_add(1); });
  for (auto& h : one) CHECK(h.load() == 1);
}

TEST_CASE("optimize finds the two-level optimum detuning") {
  Species s = mg();
  OptimizeSpec spec;
  spec.species_name = "Mg";
  spec.omega1 = 0.01 * s.gamma1;
  spec.delta1 = {-2 * s.gamma1, -0.05 * s.gamma1, 40};
  spec.delta2 = AxisSpec::fixed(0.0);
  spec.omega2 = AxisSpec::fixed(0.0);

  OptimizeResult result = run_optimize(spec, s, 2);
  REQUIRE(result.found);
  CHECK(result.best.delta1 > -0.6 * s.gamma1);
  CHECK(result.best.delta1 < -0.4 * s.gamma1);
  REQUIRE(result.best_report.temperature.has_value());
  CHECK(*result.best_report.temperature ==
        doctest::Approx(hbar * s.gamma1 / (2 * k_boltzmann)).epsilon(0.05));
  CHECK(result.best_report.capture.has_value());
  CHECK(result.frontier.size() == 40);

  std::ostringstream out;
  write_optimize_csv(out, spec, s, result);
  CHECK(out.str().find("# best delta1=") != std::string::npos);
}

TEST_CASE("optimize over the coupling-laser box beats the bare Doppler limit") {
  Species s = mg();
  OptimizeSpec spec;
  spec.species_name = "Mg";
  spec.omega1 = 0.01 * s.gamma1;
  spec.delta1 = {0.0, 1.0 * s.gamma1, 9};
  spec.delta2 = {5 * s.gamma2, 40 * s.gamma2, 8};
  spec.omega2 = {5 * s.gamma2, 20 * s.gamma2, 4};

  OptimizeResult result = run_optimize(spec, s, 0);
  REQUIRE(result.found);
  REQUIRE(result.best_report.temperature.has_value());
  CHECK(*result.best_report.temperature <= doppler_limit(s.gamma1) / 3);
}

TEST_CASE("optimize reports when the box never cools") {
  Species s = mg();
  OptimizeSpec spec;
  spec.species_name = "Mg";
  spec.omega1 = 0.01 * s.gamma1;
  spec.delta1 = {0.1 * s.gamma1, 1.5 * s.gamma1, 8};
  spec.delta2 = AxisSpec::fixed(0.0);
  spec.omega2 = AxisSpec::fixed(0.0);

  OptimizeResult result = run_optimize(spec, s, 2);
  CHECK_FALSE(result.found);
  std::ostringstream out;
  write_optimize_csv(out, spec, s, result);
  CHECK(out.str().find("# no cooling found") != std::string::npos);
}

TEST_CASE("optimize spec validation") {
  OptimizeSpec spec;
  spec.omega1 = 1.0;
  spec.delta1 = {0, 1, 2};  // 2 points: too few for a range
  spec.delta2 = AxisSpec::fixed(0);
  spec.omega2 = AxisSpec::fixed(0);
  CHECK_THROWS_AS(spec.validate(), invalid_argument_error);
  spec.delta1 = {1, 1, 3};  // degenerate
  CHECK_THROWS_AS(spec.validate(), invalid_argument_error);
  spec.delta1 = {0, 1, 3};
  spec.omega2 = AxisSpec::fixed(-1);
  CHECK_THROWS_AS(spec.validate(), invalid_argument_error);
}

TEST_CASE("scan config file round trip") {
  TempFile cfg(
      "# reproduction setup\n"
      "[scan]\n"
      "species = Mg\n"
      "axis = delta1\n"
      "range = -1.5g1:1.5g1:31\n"
      "omega1 = 0.01g1\n"
      "omega2 = 10g2\n"
      "delta2 = -20g2\n"
      "outputs = absorption,alpha,temperature\n");
  ParsedConfig parsed = load_config_file(cfg.path);
  CHECK(parsed.kind == ParsedConfig::Kind::scan);
  Species s = parsed.species;
  CHECK(s.name == "Mg");
  CHECK(parsed.scan.axis == ScanAxis::delta1);
  CHECK(parsed.scan.points == 31);
  CHECK(parsed.scan.start == doctest::Approx(-1.5 * s.gamma1));
  CHECK(parsed.scan.fixed.omega2 == doctest::Approx(10 * s.gamma2));
  CHECK(parsed.scan.fixed.delta2 == doctest::Approx(-20 * s.gamma2));
  CHECK(parsed.scan.outputs.size() == 3);
}

TEST_CASE("optimize config file round trip") {
  TempFile cfg(
      "[optimize]\n"
      "species = Mg\n"
      "omega1 = 0.01g1\n"
      "delta1 = -2g1:-0.05g1:11\n"
      "delta2 = 0\n"
      "omega2 = 0\n"
      "chi1 = 1\n"
      "chi2 = 0.4\n");
  ParsedConfig parsed = load_config_file(cfg.path);
  CHECK(parsed.kind == ParsedConfig::Kind::optimize);
  CHECK(parsed.optimize.delta1.points == 11);
  CHECK(parsed.optimize.delta2.points == 1);
  CHECK(parsed.optimize.geometry.chi2 == doctest::Approx(0.4));
}

TEST_CASE("config file error paths") {
  Species s = mg();
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_config_file("no_such_file.cfg"), io_error);
  }
  SUBCASE("no section") {
    TempFile cfg("species = Mg\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
  SUBCASE("wrong section name") {
    TempFile cfg("[sweep]\nspecies = Mg\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
  SUBCASE("axis field fixed and scanned") {
    TempFile cfg("[scan]\nspecies = Mg\naxis = delta1\nrange = -1g1:1g1:5\ndelta1 = 0.5g1\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
  SUBCASE("two-photon axis conflicts with a fixed delta2") {
    TempFile cfg("[scan]\nspecies = Mg\naxis = two_photon\nrange = -4g2:4g2:5\n"
                 "delta1 = -40g1\ndelta2 = 1g2\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
  SUBCASE("unknown key") {
    TempFile cfg("[scan]\nspecies = Mg\naxis = delta1\nrange = -1g1:1g1:5\nbogus = 1\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
  SUBCASE("unknown species") {
    TempFile cfg("[scan]\nspecies = Xx\naxis = delta1\nrange = -1g1:1g1:5\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), invalid_argument_error);
  }
  SUBCASE("unknown output") {
    TempFile cfg("[scan]\nspecies = Mg\naxis = delta1\nrange = -1g1:1g1:5\noutputs = resonance\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
  SUBCASE("missing required key") {
    TempFile cfg("[optimize]\nspecies = Mg\ndelta1 = 0:1:3\ndelta2 = 0\nomega2 = 0\n");
    CHECK_THROWS_AS(load_config_file(cfg.path), parse_error);
  }
}

TEST_CASE("two-photon scan csv names its axis column") {
  Species s = mg();
  ScanSpec spec;
  spec.species_name = "Mg";
  spec.fixed = {0.01 * s.gamma1, 50 * s.gamma2, -40 * s.gamma1, 0};
  spec.axis = ScanAxis::two_photon;
  spec.start = -1 * s.gamma2;
  spec.stop = 1 * s.gamma2;
  spec.points = 3;
  spec.outputs = {ScanOutput::absorption};
  auto rows = run_scan(spec, s, 1);
  std::ostringstream out;
  write_scan_csv(out, spec, s, rows);
  CHECK(out.str().find("two_photon_rad_per_s,delta1,delta2,") != std::string::npos);
  // each row resolves delta2 = axis - delta1
  for (const ScanRow& row : rows) {
    CHECK(row.lasers.delta2 == row.axis_value - spec.fixed.delta1);
  }
}

TEST_CASE("scan csv renders the force column when requested") {
  Species s = mg();
  ScanSpec spec;
  spec.species_name = "Mg";
  spec.fixed = {0.01 * s.gamma1, 0, 0, 0};
  spec.axis = ScanAxis::delta1;
  spec.start = -0.6 * s.gamma1;
  spec.stop = -0.4 * s.gamma1;
  spec.points = 2;
  spec.outputs = {ScanOutput::force};
  auto rows = run_scan(spec, s, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].force_max.has_value());
  CHECK(*rows[0].force_max > 0);
  std::ostringstream out;
  write_scan_csv(out, spec, s, rows);
  CHECK(out.str().find("Fmax_N") != std::string::npos);
  CHECK(out.str().find("alpha_per_s") == std::string::npos);
}
