#ifndef CASCADE_SCAN_HPP
#define CASCADE_SCAN_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cascade/cooling.hpp"
#include "cascade/species.hpp"

namespace cascade {

// "0.5g1" (units of gamma1), "-20g2" (units of gamma2), "39.4MHz"
// (ordinary frequency, converted to angular), or a plain rad/s number.
double parse_frequency(const std::string& text, const Species& species);

struct FrequencyRange {
  double start = 0;
  double stop = 0;
  int points = 0;
};

// "start:stop:points" with unit suffixes on start/stop.
FrequencyRange parse_frequency_range(const std::string& text, const Species& species);

enum class ScanAxis { delta1, delta2, two_photon, omega2 };
std::string axis_name(ScanAxis axis);

enum class ScanOutput { absorption, alpha, temperature, force, capture };

struct ScanSpec {
  std::string species_name;
  LaserConfig fixed;  // template; the axis-scanned field is overwritten per row
  EmissionGeometry geometry;
  ScanAxis axis = ScanAxis::delta1;
  double start = 0;  // rad/s
  double stop = 0;
  int points = 0;
  std::set<ScanOutput> outputs{ScanOutput::alpha, ScanOutput::temperature};

  void validate() const;
  std::vector<double> axis_values() const;
  // two_photon scans delta1+delta2 at fixed delta1.
  LaserConfig lasers_at(double axis_value) const;
};

struct ScanRow {
  double axis_value = 0;
  LaserConfig lasers;
  std::optional<double> absorption;       // R1(v=0)
  std::optional<CoolingReport> report;    // when alpha/temperature/capture requested
  std::optional<double> force_max;        // max |F| over the default velocity grid
  std::string error;                      // per-row failure; scan continues
};

// Rows are computed independently (worker pool of `threads`; <= 0 picks the
// hardware count) and returned in grid order, so output is thread-count
// independent.
std::vector<ScanRow> run_scan(const ScanSpec& spec, const Species& species, int threads = 1);

void write_scan_csv(std::ostream& out, const ScanSpec& spec, const Species& species,
                    std::span<const ScanRow> rows);

// --- grid-search optimization ------------------------------------------------

// One box axis: a range (points >= 3) or a fixed scalar (points == 1).
struct AxisSpec {
  double start = 0;
  double stop = 0;
  int points = 1;

  static AxisSpec fixed(double value) { return {value, value, 1}; }
  std::vector<double> values() const;
};

struct OptimizeSpec {
  std::string species_name;
  double omega1 = 0;  // rad/s, fixed
  AxisSpec delta1;
  AxisSpec delta2;
  AxisSpec omega2;
  EmissionGeometry geometry;

  void validate() const;
};

struct OptimizeRow {
  LaserConfig lasers;
  std::optional<CoolingReport> report;
  std::string error;
};

struct OptimizeResult {
  bool found = false;  // false: no cooling-regime point in the box
  LaserConfig best;
  CoolingReport best_report;  // includes capture range
  std::size_t best_index = 0;
  std::vector<OptimizeRow> frontier;  // full grid in lexicographic order
};

// Exhaustive grid over (delta1, delta2, omega2); argmin of T among cooling
// points, deterministic tie-break on the lowest delta1 index, then delta2,
// then omega2.
OptimizeResult run_optimize(const OptimizeSpec& spec, const Species& species, int threads = 1);

void write_optimize_csv(std::ostream& out, const OptimizeSpec& spec, const Species& species,
                        const OptimizeResult& result);

// Single-point CoolingReport row (cooling-engine CSV format).
void write_report_csv(std::ostream& out, const Species& species, const LaserConfig& lasers,
                      const CoolingReport& report);

// --- config files -------------------------------------------------------------
//
// Plain text `key = value` under a single `[scan]` or `[optimize]` section;
// ranges as start:stop:points; unit suffixes resolved against the configured
// species. `species_path` overrides the species data file ("" = env/bundled).

struct ParsedConfig {
  enum class Kind { scan, optimize };
  Kind kind = Kind::scan;
  Species species;
  ScanSpec scan;
  OptimizeSpec optimize;
};

ParsedConfig load_config_file(const std::string& path, const std::string& species_path = {});

// Worker pool used by scan/optimize; exposed for reuse.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace cascade

#endif
