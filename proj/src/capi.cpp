#include "cascadecool.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "cascade/cooling.hpp"
#include "cascade/errors.hpp"
#include "cascade/rates.hpp"
#include "cascade/scan.hpp"
#include "cascade/species.hpp"

using namespace cascade;

struct ccool_species {
  Species value;
};

namespace {

thread_local std::string g_last_error;

ccool_status fail(ccool_status status, const char* what) {
  g_last_error = what ? what : "";
  return status;
}

template <typename Fn>
ccool_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CCOOL_OK;
  } catch (const solver_error& e) {
    return fail(CCOOL_ERR_SINGULAR, e.what());
  } catch (const convergence_error& e) {
    return fail(CCOOL_ERR_NO_CONVERGENCE, e.what());
  } catch (const parse_error& e) {
    return fail(CCOOL_ERR_PARSE, e.what());
  } catch (const io_error& e) {
    return fail(CCOOL_ERR_IO, e.what());
  } catch (const invalid_argument_error& e) {
    return fail(CCOOL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CCOOL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CCOOL_ERR_INTERNAL, "unknown error");
  }
}

LaserConfig to_lasers(const ccool_lasers& c) { return {c.omega1, c.omega2, c.delta1, c.delta2}; }

EmissionGeometry to_geometry(const ccool_geometry* c) {
  if (!c) return EmissionGeometry::three_dimensional();
  return {c->chi1, c->chi2};
}

ccool_report to_c_report(const CoolingReport& r) {
  ccool_report out;
  out.alpha_per_s = r.alpha;
  out.heating_watt = r.heating;
  out.temperature_kelvin =
      r.temperature ? *r.temperature : std::numeric_limits<double>::quiet_NaN();
  out.regime = r.regime == Regime::cooling ? 1 : (r.regime == Regime::heating ? -1 : 0);
  out.capture_mps = r.capture ? r.capture->dv : std::numeric_limits<double>::quiet_NaN();
  out.capture_at_grid_edge = r.capture && r.capture->at_grid_edge ? 1 : 0;
  out.saturated = r.saturation_warning ? 1 : 0;
  return out;
}

// Writes through `emit(stream)` to out_path, "-"/NULL meaning stdout.
template <typename Emit>
void write_to(const char* out_path, Emit&& emit) {
  if (!out_path || !*out_path || std::strcmp(out_path, "-") == 0) {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw io_error(std::string("cannot open output file '") + out_path + "'");
  emit(file);
  if (!file) throw io_error(std::string("write failed for '") + out_path + "'");
}

std::string opt_string(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

const char* ccool_status_name(ccool_status status) {
  switch (status) {
    case CCOOL_OK: return "CCOOL_OK";
    case CCOOL_ERR_INVALID_ARGUMENT: return "CCOOL_ERR_INVALID_ARGUMENT";
    case CCOOL_ERR_PARSE: return "CCOOL_ERR_PARSE";
    case CCOOL_ERR_NOT_FOUND: return "CCOOL_ERR_NOT_FOUND";
    case CCOOL_ERR_SINGULAR: return "CCOOL_ERR_SINGULAR";
    case CCOOL_ERR_NO_CONVERGENCE: return "CCOOL_ERR_NO_CONVERGENCE";
    case CCOOL_ERR_IO: return "CCOOL_ERR_IO";
    case CCOOL_ERR_INTERNAL: return "CCOOL_ERR_INTERNAL";
  }
  return "CCOOL_?";
}

const char* ccool_last_error(void) { return g_last_error.c_str(); }

ccool_status ccool_species_open(const char* path, const char* name, ccool_species** out) {
  if (!name || !out) return fail(CCOOL_ERR_INVALID_ARGUMENT, "name and out must be non-NULL");
  *out = nullptr;
  ccool_status status = guarded([&] {
    *out = new ccool_species{load_species(name, opt_string(path))};
  });
  if (status == CCOOL_ERR_INVALID_ARGUMENT &&
      g_last_error.find("unknown species") != std::string::npos) {
    return CCOOL_ERR_NOT_FOUND;
  }
  return status;
}

void ccool_species_close(ccool_species* species) { delete species; }

ccool_status ccool_species_list(const char* path, char* buffer, size_t cap, size_t* needed) {
  if (!needed) return fail(CCOOL_ERR_INVALID_ARGUMENT, "needed must be non-NULL");
  return guarded([&] {
    std::string joined;
    for (const std::string& name : species_names(opt_string(path))) {
      if (!joined.empty()) joined += '\n';
      joined += name;
    }
    *needed = joined.size() + 1;
    if (buffer && cap > 0) {
      size_t n = std::min(cap - 1, joined.size());
      std::memcpy(buffer, joined.data(), n);
      buffer[n] = '\0';
    }
  });
}

ccool_status ccool_species_describe(const ccool_species* species, ccool_species_info* info) {
  if (!species || !info) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const Species& s = species->value;
    std::snprintf(info->name, sizeof info->name, "%s", s.name.c_str());
    info->mass_kg = s.mass;
    info->lambda1_m = s.lambda1;
    info->lambda2_m = s.lambda2;
    info->gamma1_rad_s = s.gamma1;
    info->gamma2_rad_s = s.gamma2;
    info->k1_rad_m = s.k1;
    info->k2_rad_m = s.k2;
    info->doppler_t1_k = doppler_limit(s.gamma1);
    info->doppler_t2_k = s.gamma2 > 0 ? doppler_limit(s.gamma2) : 0.0;
  });
}

ccool_status ccool_parse_frequency(const ccool_species* species, const char* text,
                                   double* rad_per_s) {
  if (!species || !text || !rad_per_s) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { *rad_per_s = parse_frequency(text, species->value); });
}

ccool_status ccool_populations(const ccool_species* species, const ccool_lasers* lasers,
                               double velocity, double pops[3]) {
  if (!species || !lasers || !pops) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    SteadyState st = steady_state(build_generator(species->value, to_lasers(*lasers), velocity));
    auto p = populations(st.rho);
    pops[0] = p[0];
    pops[1] = p[1];
    pops[2] = p[2];
  });
}

ccool_status ccool_rates(const ccool_species* species, const ccool_lasers* lasers, double velocity,
                         double* r1, double* r2) {
  if (!species || !lasers) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    RatePoint pt = scattering_rates(species->value, to_lasers(*lasers), velocity);
    if (r1) *r1 = pt.r1;
    if (r2) *r2 = pt.r2;
  });
}

ccool_status ccool_rate_r1_perturbative(const ccool_species* species, const ccool_lasers* lasers,
                                        double velocity, double* r1) {
  if (!species || !lasers || !r1) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *r1 = rate_r1_perturbative(species->value, to_lasers(*lasers), velocity);
  });
}

ccool_status ccool_force(const ccool_species* species, const ccool_lasers* lasers, double velocity,
                         double* force_newton) {
  if (!species || !lasers || !force_newton) {
    return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  }
  return guarded([&] { *force_newton = force(species->value, to_lasers(*lasers), velocity); });
}

ccool_status ccool_cooling_report(const ccool_species* species, const ccool_lasers* lasers,
                                  const ccool_geometry* geometry, int with_capture,
                                  ccool_report* report) {
  if (!species || !lasers || !report) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    CoolingReport r = cooling_report(species->value, to_lasers(*lasers), to_geometry(geometry),
                                     with_capture != 0);
    *report = to_c_report(r);
  });
}

ccool_status ccool_write_rates_csv(const ccool_species* species, const ccool_lasers* lasers,
                                   double vmax, int points, const char* out_path) {
  if (!species || !lasers) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const Species& sp = species->value;
    LaserConfig cfg = to_lasers(*lasers);
    if (points <= 0) points = 401;
    std::vector<double> grid;
    if (vmax > 0) {
      grid.resize(points);
      for (int i = 0; i < points; ++i) grid[i] = -vmax + 2 * vmax * i / (points - 1);
    } else {
      grid = default_velocity_grid(sp, cfg, points);
    }
    auto pts = force_profile(sp, cfg, grid);
    write_to(out_path, [&](std::ostream& os) { write_rate_profile_csv(os, sp, cfg, pts); });
  });
}

ccool_status ccool_write_spectrum_csv(const ccool_species* species, const ccool_lasers* lasers,
                                      double delta1_min, double delta1_max, int points,
                                      const char* out_path) {
  if (!species || !lasers) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    if (points <= 1) throw invalid_argument_error("spectrum needs at least 2 points");
    if (!(delta1_min < delta1_max)) {
      throw invalid_argument_error("spectrum needs delta1_min < delta1_max");
    }
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
      grid[i] = delta1_min + (delta1_max - delta1_min) * i / (points - 1);
    }
    const Species& sp = species->value;
    LaserConfig cfg = to_lasers(*lasers);
    auto pts = absorption_spectrum(sp, cfg, grid);
    write_to(out_path, [&](std::ostream& os) { write_spectrum_csv(os, sp, cfg, pts); });
  });
}

ccool_status ccool_write_report_csv(const ccool_species* species, const ccool_lasers* lasers,
                                    const ccool_geometry* geometry, int with_capture,
                                    const char* out_path) {
  if (!species || !lasers) return fail(CCOOL_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const Species& sp = species->value;
    LaserConfig cfg = to_lasers(*lasers);
    CoolingReport r = cooling_report(sp, cfg, to_geometry(geometry), with_capture != 0);
    write_to(out_path, [&](std::ostream& os) { write_report_csv(os, sp, cfg, r); });
  });
}

ccool_status ccool_run_scan(const char* config_path, const char* species_path,
                            const char* out_path, int threads) {
  if (!config_path) return fail(CCOOL_ERR_INVALID_ARGUMENT, "config_path must be non-NULL");
  return guarded([&] {
    ParsedConfig config = load_config_file(config_path, opt_string(species_path));
    if (config.kind != ParsedConfig::Kind::scan) {
      throw parse_error(std::string(config_path) + ": expected a [scan] section");
    }
    auto rows = run_scan(config.scan, config.species, threads);
    write_to(out_path,
             [&](std::ostream& os) { write_scan_csv(os, config.scan, config.species, rows); });
  });
}

ccool_status ccool_run_optimize(const char* config_path, const char* species_path,
                                const char* out_path, int threads, ccool_optimize_best* best) {
  if (!config_path) return fail(CCOOL_ERR_INVALID_ARGUMENT, "config_path must be non-NULL");
  return guarded([&] {
    ParsedConfig config = load_config_file(config_path, opt_string(species_path));
    if (config.kind != ParsedConfig::Kind::optimize) {
      throw parse_error(std::string(config_path) + ": expected an [optimize] section");
    }
    OptimizeResult result = run_optimize(config.optimize, config.species, threads);
    write_to(out_path, [&](std::ostream& os) {
      write_optimize_csv(os, config.optimize, config.species, result);
    });
    if (best) {
      best->found = result.found ? 1 : 0;
      if (result.found) {
        best->lasers = {result.best.omega1, result.best.omega2, result.best.delta1,
                        result.best.delta2};
        best->report = to_c_report(result.best_report);
      } else {
        best->lasers = {0, 0, 0, 0};
        std::memset(&best->report, 0, sizeof best->report);
      }
    }
  });
}

}  // extern "C"
