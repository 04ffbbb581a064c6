/* C API of the cascade laser-cooling library.
 *
 * Opaque handles plus status codes; all functions are thread-safe for
 * distinct handles, and species handles are immutable so they may be shared.
 * Frequencies are angular (rad/s), velocities m/s, temperatures kelvin.
 */
#ifndef CASCADECOOL_H
#define CASCADECOOL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef CCOOL_API
#define CCOOL_API __attribute__((visibility("default")))
#endif

typedef enum ccool_status {
  CCOOL_OK = 0,
  CCOOL_ERR_INVALID_ARGUMENT = 1,
  CCOOL_ERR_PARSE = 2,
  CCOOL_ERR_NOT_FOUND = 3,
  CCOOL_ERR_SINGULAR = 4,       /* steady state non-unique / ill-conditioned */
  CCOOL_ERR_NO_CONVERGENCE = 5, /* derivative or quadrature refinement failed */
  CCOOL_ERR_IO = 6,
  CCOOL_ERR_INTERNAL = 7
} ccool_status;

/* Human-readable code name ("CCOOL_ERR_PARSE", ...). */
CCOOL_API const char* ccool_status_name(ccool_status status);

/* Message of the last failing call on this thread; empty string if none. */
CCOOL_API const char* ccool_last_error(void);

/* ---- species ---------------------------------------------------------- */

typedef struct ccool_species ccool_species;

/* Load one species by name. path == NULL or "" resolves through the
 * CASCADE_COOL_SPECIES_PATH environment variable, then the bundled table. */
CCOOL_API ccool_status ccool_species_open(const char* path, const char* name,
                                          ccool_species** out);
CCOOL_API void ccool_species_close(ccool_species* species);

/* Newline-separated species names; writes at most `cap` bytes including the
 * NUL terminator and stores the required size in `needed`. */
CCOOL_API ccool_status ccool_species_list(const char* path, char* buffer, size_t cap,
                                          size_t* needed);

typedef struct ccool_species_info {
  char name[32];
  double mass_kg;
  double lambda1_m, lambda2_m;
  double gamma1_rad_s, gamma2_rad_s;
  double k1_rad_m, k2_rad_m;
  double doppler_t1_k, doppler_t2_k; /* hbar*gamma/(2 kB) */
} ccool_species_info;

CCOOL_API ccool_status ccool_species_describe(const ccool_species* species,
                                              ccool_species_info* info);

/* ---- point computations ------------------------------------------------ */

typedef struct ccool_lasers {
  double omega1, omega2; /* Rabi frequencies, >= 0 */
  double delta1, delta2; /* detunings */
} ccool_lasers;

typedef struct ccool_geometry {
  double chi1, chi2; /* emission-pattern second moments, [0, 1] */
} ccool_geometry;

/* "0.5g1" / "-20g2" / "39.4MHz" / plain rad/s. */
CCOOL_API ccool_status ccool_parse_frequency(const ccool_species* species, const char* text,
                                             double* rad_per_s);

/* Steady-state populations (p0, p1, p2) at one velocity. */
CCOOL_API ccool_status ccool_populations(const ccool_species* species, const ccool_lasers* lasers,
                                         double velocity, double populations[3]);

/* Beam-pair scattering rates R1, R2 (either output may be NULL). */
CCOOL_API ccool_status ccool_rates(const ccool_species* species, const ccool_lasers* lasers,
                                   double velocity, double* r1, double* r2);

/* Perturbative lower-transition rate (weak omega1 formula). */
CCOOL_API ccool_status ccool_rate_r1_perturbative(const ccool_species* species,
                                                  const ccool_lasers* lasers, double velocity,
                                                  double* r1);

/* Net light force in newtons. */
CCOOL_API ccool_status ccool_force(const ccool_species* species, const ccool_lasers* lasers,
                                   double velocity, double* force_newton);

typedef struct ccool_report {
  double alpha_per_s;
  double heating_watt;
  double temperature_kelvin;  /* NaN unless regime == 1 */
  int regime;                 /* 1 cooling, -1 heating, 0 neutral */
  double capture_mps;         /* NaN when not computed */
  int capture_at_grid_edge;
  int saturated;
} ccool_report;

CCOOL_API ccool_status ccool_cooling_report(const ccool_species* species,
                                            const ccool_lasers* lasers,
                                            const ccool_geometry* geometry, int with_capture,
                                            ccool_report* report);

/* ---- CSV producers ------------------------------------------------------ */
/* out_path == NULL or "-" writes to stdout. */

/* v grid: `points` samples over [-vmax, vmax]; vmax <= 0 picks the default
 * regime-dependent half-width, points <= 0 picks 401. */
CCOOL_API ccool_status ccool_write_rates_csv(const ccool_species* species,
                                             const ccool_lasers* lasers, double vmax, int points,
                                             const char* out_path);

CCOOL_API ccool_status ccool_write_spectrum_csv(const ccool_species* species,
                                                const ccool_lasers* lasers, double delta1_min,
                                                double delta1_max, int points,
                                                const char* out_path);

CCOOL_API ccool_status ccool_write_report_csv(const ccool_species* species,
                                              const ccool_lasers* lasers,
                                              const ccool_geometry* geometry, int with_capture,
                                              const char* out_path);

/* ---- config-driven runs ------------------------------------------------- */

/* Run a [scan] config file; species_path NULL/"" resolves as in
 * ccool_species_open; threads <= 0 uses the hardware count. */
CCOOL_API ccool_status ccool_run_scan(const char* config_path, const char* species_path,
                                      const char* out_path, int threads);

typedef struct ccool_optimize_best {
  int found; /* 0: no cooling-regime point in the box */
  ccool_lasers lasers;
  ccool_report report;
} ccool_optimize_best;

/* Run an [optimize] config file; frontier CSV goes to out_path, the winner
 * (if any) is stored in *best. */
CCOOL_API ccool_status ccool_run_optimize(const char* config_path, const char* species_path,
                                          const char* out_path, int threads,
                                          ccool_optimize_best* best);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CASCADECOOL_H */
