// Command line front end; talks to the library through the C API only.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cascadecool.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitComputation = 2;

int exit_code_for(ccool_status status) {
  switch (status) {
    case CCOOL_OK:
      return 0;
    case CCOOL_ERR_INVALID_ARGUMENT:
    case CCOOL_ERR_PARSE:
    case CCOOL_ERR_NOT_FOUND:
    case CCOOL_ERR_IO:
      return kExitUsage;
    default:
      return kExitComputation;
  }
}

int report_failure(ccool_status status) {
  std::fprintf(stderr, "error: %s (%s)\n", ccool_last_error(), ccool_status_name(status));
  return exit_code_for(status);
}

struct Options {
  std::string species;
  std::string species_file;
  std::string omega1 = "0";
  std::string omega2 = "0";
  std::string delta1 = "0";
  std::string delta2 = "0";
  double chi1 = 1.0;
  double chi2 = 1.0;
  std::string out = "-";
  int threads = 1;
};

const char* path_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// RAII species handle.
struct SpeciesHandle {
  ccool_species* ptr = nullptr;
  ~SpeciesHandle() { ccool_species_close(ptr); }
};

int open_species(const Options& opt, SpeciesHandle& handle) {
  if (opt.species.empty()) {
    std::fprintf(stderr, "error: --species is required for this command\n");
    return kExitUsage;
  }
  ccool_status status =
      ccool_species_open(path_or_null(opt.species_file), opt.species.c_str(), &handle.ptr);
  if (status != CCOOL_OK) return report_failure(status);
  return 0;
}

int resolve_lasers(const Options& opt, const ccool_species* species, ccool_lasers& lasers) {
  struct Item { const std::string* text; double* slot; const char* flag; };
  const Item items[] = {{&opt.omega1, &lasers.omega1, "--omega1"},
                        {&opt.omega2, &lasers.omega2, "--omega2"},
                        {&opt.delta1, &lasers.delta1, "--delta1"},
                        {&opt.delta2, &lasers.delta2, "--delta2"}};
  for (const Item& item : items) {
    ccool_status status = ccool_parse_frequency(species, item.text->c_str(), item.slot);
    if (status != CCOOL_OK) {
      std::fprintf(stderr, "error: %s: %s\n", item.flag, ccool_last_error());
      return kExitUsage;
    }
  }
  return 0;
}

int cmd_species_list(const Options& opt) {
  size_t needed = 0;
  ccool_status status = ccool_species_list(path_or_null(opt.species_file), nullptr, 0, &needed);
  if (status != CCOOL_OK) return report_failure(status);
  std::vector<char> buffer(needed);
  status = ccool_species_list(path_or_null(opt.species_file), buffer.data(), buffer.size(), &needed);
  if (status != CCOOL_OK) return report_failure(status);
  std::printf("%s\n", buffer.data());
  return 0;
}

int cmd_species_show(const Options& opt, const std::string& name) {
  SpeciesHandle handle;
  ccool_status status =
      ccool_species_open(path_or_null(opt.species_file), name.c_str(), &handle.ptr);
  if (status != CCOOL_OK) return report_failure(status);
  ccool_species_info info;
  status = ccool_species_describe(handle.ptr, &info);
  if (status != CCOOL_OK) return report_failure(status);
  std::printf("name                = %s\n", info.name);
  std::printf("mass_kg             = %.15g\n", info.mass_kg);
  std::printf("lambda1_nm          = %.15g\n", info.lambda1_m * 1e9);
  std::printf("lambda2_nm          = %.15g\n", info.lambda2_m * 1e9);
  std::printf("gamma1_over_2pi_MHz = %.15g\n", info.gamma1_rad_s / (2 * M_PI) / 1e6);
  std::printf("gamma2_over_2pi_MHz = %.15g\n", info.gamma2_rad_s / (2 * M_PI) / 1e6);
  std::printf("k1_rad_per_m        = %.15g\n", info.k1_rad_m);
  std::printf("k2_rad_per_m        = %.15g\n", info.k2_rad_m);
  std::printf("doppler_T1_mK       = %.6g\n", info.doppler_t1_k * 1e3);
  std::printf("doppler_T2_uK       = %.6g\n", info.doppler_t2_k * 1e6);
  return 0;
}

int cmd_rates(const Options& opt, double vmax, int points) {
  SpeciesHandle handle;
  if (int rc = open_species(opt, handle)) return rc;
  ccool_lasers lasers;
  if (int rc = resolve_lasers(opt, handle.ptr, lasers)) return rc;
  ccool_status status =
      ccool_write_rates_csv(handle.ptr, &lasers, vmax, points, opt.out.c_str());
  return status == CCOOL_OK ? 0 : report_failure(status);
}

int cmd_spectrum(const Options& opt, const std::string& d1min, const std::string& d1max,
                 int points) {
  SpeciesHandle handle;
  if (int rc = open_species(opt, handle)) return rc;
  ccool_lasers lasers;
  if (int rc = resolve_lasers(opt, handle.ptr, lasers)) return rc;
  double lo = 0, hi = 0;
  if (ccool_parse_frequency(handle.ptr, d1min.c_str(), &lo) != CCOOL_OK ||
      ccool_parse_frequency(handle.ptr, d1max.c_str(), &hi) != CCOOL_OK) {
    std::fprintf(stderr, "error: bad spectrum bounds: %s\n", ccool_last_error());
    return kExitUsage;
  }
  ccool_status status =
      ccool_write_spectrum_csv(handle.ptr, &lasers, lo, hi, points, opt.out.c_str());
  return status == CCOOL_OK ? 0 : report_failure(status);
}

int cmd_report(const Options& opt, bool no_capture) {
  SpeciesHandle handle;
  if (int rc = open_species(opt, handle)) return rc;
  ccool_lasers lasers;
  if (int rc = resolve_lasers(opt, handle.ptr, lasers)) return rc;
  ccool_geometry geometry{opt.chi1, opt.chi2};
  ccool_status status =
      ccool_write_report_csv(handle.ptr, &lasers, &geometry, no_capture ? 0 : 1, opt.out.c_str());
  return status == CCOOL_OK ? 0 : report_failure(status);
}

int cmd_scan(const Options& opt, const std::string& config) {
  ccool_status status = ccool_run_scan(config.c_str(), path_or_null(opt.species_file),
                                       opt.out.c_str(), opt.threads);
  return status == CCOOL_OK ? 0 : report_failure(status);
}

int cmd_optimize(const Options& opt, const std::string& config) {
  ccool_optimize_best best;
  ccool_status status = ccool_run_optimize(config.c_str(), path_or_null(opt.species_file),
                                           opt.out.c_str(), opt.threads, &best);
  if (status != CCOOL_OK) return report_failure(status);
  if (!best.found) {
    std::printf("no cooling found\n");
    return 0;
  }
  std::printf("best: delta1=%.15g delta2=%.15g omega1=%.15g omega2=%.15g rad/s\n",
              best.lasers.delta1, best.lasers.delta2, best.lasers.omega1, best.lasers.omega2);
  std::printf("alpha=%.15g 1/s  H=%.15g W  T=%.15g K  capture=%.15g m/s\n",
              best.report.alpha_per_s, best.report.heating_watt, best.report.temperature_kelvin,
              best.report.capture_mps);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laser-cooling observables for three-level cascade atoms"};
  app.fallthrough();
  Options opt;

  app.add_option("--species", opt.species, "Species name (bundled: Mg, Ca, Cs)");
  app.add_option("--species-file", opt.species_file,
                 "Species data file (overrides CASCADE_COOL_SPECIES_PATH)");
  app.add_option("--omega1", opt.omega1, "Rabi frequency of the lower transition (g1/g2/MHz)");
  app.add_option("--omega2", opt.omega2, "Rabi frequency of the upper transition (g1/g2/MHz)");
  app.add_option("--delta1", opt.delta1, "Lower-transition detuning (g1/g2/MHz)");
  app.add_option("--delta2", opt.delta2, "Upper-transition detuning (g1/g2/MHz)");
  app.add_option("--chi1", opt.chi1, "Emission second moment, lower transition [0,1]");
  app.add_option("--chi2", opt.chi2, "Emission second moment, upper transition [0,1]");
  app.add_option("--out", opt.out, "Output path ('-' = stdout)");
  app.add_option("--threads", opt.threads, "Worker threads for scan/optimize (<=0: hardware)");

  int rc = -1;

  auto* species_cmd = app.add_subcommand("species", "Species database queries");
  species_cmd->require_subcommand(1);
  auto* list_cmd = species_cmd->add_subcommand("list", "List available species");
  list_cmd->callback([&] { rc = cmd_species_list(opt); });
  std::string show_name;
  auto* show_cmd = species_cmd->add_subcommand("show", "Show one species record");
  show_cmd->add_option("name", show_name, "Species name")->required();
  show_cmd->callback([&] { rc = cmd_species_show(opt, show_name); });

  double vmax = 0;
  int rate_points = 401;
  auto* rates_cmd = app.add_subcommand("rates", "Velocity profile of R1, R2 and force (CSV)");
  rates_cmd->add_option("--vmax", vmax, "Velocity half-range in m/s (default: regime-based)");
  rates_cmd->add_option("--points", rate_points, "Grid points");
  rates_cmd->callback([&] { rc = cmd_rates(opt, vmax, rate_points); });

  std::string d1min = "-1.5g1", d1max = "1.5g1";
  int spectrum_points = 401;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Absorption vs delta1 at v=0 (CSV)");
  spectrum_cmd->add_option("--d1min", d1min, "Scan start (g1/g2/MHz)");
  spectrum_cmd->add_option("--d1max", d1max, "Scan stop (g1/g2/MHz)");
  spectrum_cmd->add_option("--points", spectrum_points, "Grid points");
  spectrum_cmd->callback([&] { rc = cmd_spectrum(opt, d1min, d1max, spectrum_points); });

  bool no_capture = false;
  auto* report_cmd = app.add_subcommand("report", "Single-point cooling report (CSV row)");
  report_cmd->add_flag("--no-capture", no_capture, "Skip the capture-range scan");
  report_cmd->callback([&] { rc = cmd_report(opt, no_capture); });

  std::string config_path;
  auto* scan_cmd = app.add_subcommand("scan", "Run a [scan] config file");
  scan_cmd->add_option("config", config_path, "Config file")->required();
  scan_cmd->callback([&] { rc = cmd_scan(opt, config_path); });

  auto* optimize_cmd = app.add_subcommand("optimize", "Run an [optimize] config file");
  optimize_cmd->add_option("config", config_path, "Config file")->required();
  optimize_cmd->callback([&] { rc = cmd_optimize(opt, config_path); });

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return rc < 0 ? kExitUsage : rc;
}
