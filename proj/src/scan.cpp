#include "cascade/scan.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"
#include "cascade/format.hpp"
#include "text_util.hpp"

namespace cascade {

namespace {

using detail::trim;

double parse_number(const std::string& token, const std::string& what) {
  std::optional<double> value = detail::parse_double(token);
  if (!value) throw parse_error("malformed " + what + " '" + token + "'");
  return *value;
}

}  // namespace

double parse_frequency(const std::string& text, const Species& species) {
  std::string s = trim(text);
  if (s.empty()) throw parse_error("empty frequency value");
  auto ends_with = [&](const char* suffix) {
    size_t n = std::strlen(suffix);
    return s.size() > n && s.compare(s.size() - n, n, suffix) == 0;
  };
  if (ends_with("MHz")) {
    return parse_number(s.substr(0, s.size() - 3), "frequency") * 1e6 * two_pi;
  }
  if (ends_with("g1")) {
    return parse_number(s.substr(0, s.size() - 2), "frequency") * species.gamma1;
  }
  if (ends_with("g2")) {
    return parse_number(s.substr(0, s.size() - 2), "frequency") * species.gamma2;
  }
  return parse_number(s, "frequency");
}

FrequencyRange parse_frequency_range(const std::string& text, const Species& species) {
  std::string s = trim(text);
  size_t c1 = s.find(':');
  size_t c2 = (c1 == std::string::npos) ? std::string::npos : s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos || s.find(':', c2 + 1) != std::string::npos) {
    throw parse_error("range '" + s + "' must be start:stop:points");
  }
  FrequencyRange r;
  r.start = parse_frequency(s.substr(0, c1), species);
  r.stop = parse_frequency(s.substr(c1 + 1, c2 - c1 - 1), species);
  double pts = parse_number(trim(s.substr(c2 + 1)), "point count");
  if (!(pts >= 1) || pts != std::floor(pts) || pts > 1e7) {
    throw parse_error("range '" + s + "' has an invalid point count");
  }
  r.points = static_cast<int>(pts);
  return r;
}

std::string axis_name(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::delta1: return "delta1";
    case ScanAxis::delta2: return "delta2";
    case ScanAxis::two_photon: return "two_photon";
    case ScanAxis::omega2: return "omega2";
  }
  return "?";
}

namespace {

std::string output_name(ScanOutput o) {
  switch (o) {
    case ScanOutput::absorption: return "absorption";
    case ScanOutput::alpha: return "alpha";
    case ScanOutput::temperature: return "temperature";
    case ScanOutput::force: return "force";
    case ScanOutput::capture: return "capture";
  }
  return "?";
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::cooling: return "cooling";
    case Regime::heating: return "heating";
    case Regime::neutral: return "neutral";
  }
  return "?";
}

}  // namespace

void ScanSpec::validate() const {
  if (!(start < stop)) throw invalid_argument_error("scan range must have start < stop");
  if (points < 2) throw invalid_argument_error("scan needs at least 2 points");
  if (outputs.empty()) throw invalid_argument_error("scan outputs are empty");
  if (axis == ScanAxis::omega2 && start < 0) {
    throw invalid_argument_error("omega2 scan range must be non-negative");
  }
  geometry.validate();
}

std::vector<double> ScanSpec::axis_values() const {
  std::vector<double> values(points);
  for (int i = 0; i < points; ++i) {
    values[i] = start + (stop - start) * i / (points - 1);
  }
  return values;
}

LaserConfig ScanSpec::lasers_at(double axis_value) const {
  LaserConfig lasers = fixed;
  switch (axis) {
    case ScanAxis::delta1: lasers.delta1 = axis_value; break;
    case ScanAxis::delta2: lasers.delta2 = axis_value; break;
    case ScanAxis::two_photon: lasers.delta2 = axis_value - fixed.delta1; break;
    case ScanAxis::omega2: lasers.omega2 = axis_value; break;
  }
  return lasers;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    threads = hc > 0 ? static_cast<int>(hc) : 2;
  }
  threads = static_cast<int>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

namespace {

double max_force_magnitude(const Species& species, const LaserConfig& lasers) {
  const double vmax = default_velocity_halfwidth(species, lasers);
  const int half = 200;
  double fmax = 0;
  for (int i = 1; i <= half; ++i) {
    double f = force(species, lasers, vmax * i / half);
    fmax = std::max(fmax, std::abs(f));
  }
  return fmax;
}

ScanRow compute_scan_row(const ScanSpec& spec, const Species& species, double axis_value) {
  ScanRow row;
  row.axis_value = axis_value;
  row.lasers = spec.lasers_at(axis_value);
  try {
    row.lasers.validate();
    if (spec.outputs.count(ScanOutput::absorption)) {
      row.absorption = rate_r1_obe(species, row.lasers, 0.0);
    }
    const bool want_capture = spec.outputs.count(ScanOutput::capture) > 0;
    if (want_capture || spec.outputs.count(ScanOutput::alpha) ||
        spec.outputs.count(ScanOutput::temperature)) {
      row.report = cooling_report(species, row.lasers, spec.geometry, want_capture);
    }
    if (spec.outputs.count(ScanOutput::force)) {
      row.force_max = max_force_magnitude(species, row.lasers);
    }
  } catch (const error& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<ScanRow> run_scan(const ScanSpec& spec, const Species& species, int threads) {
  spec.validate();
  const std::vector<double> values = spec.axis_values();
  std::vector<ScanRow> rows(values.size());
  parallel_for(values.size(), threads,
               [&](std::size_t i) { rows[i] = compute_scan_row(spec, species, values[i]); });
  return rows;
}

namespace {

void write_report_columns(std::ostream& out, const std::optional<CoolingReport>& report) {
  if (!report) {
    out << ",,,,,";
    return;
  }
  out << ',' << fmt_g(report->alpha) << ',' << fmt_g(report->heating) << ',';
  if (report->temperature) out << fmt_g(*report->temperature);
  out << ',' << regime_name(report->regime) << ',';
  if (report->capture) out << fmt_g(report->capture->dv);
  out << ',' << (report->saturation_warning ? '1' : '0');
}

}  // namespace

void write_scan_csv(std::ostream& out, const ScanSpec& spec, const Species& species,
                    std::span<const ScanRow> rows) {
  out << "# scan species=" << species.name << " axis=" << axis_name(spec.axis) << " range="
      << fmt_g(spec.start) << ':' << fmt_g(spec.stop) << ':' << spec.points
      << " omega1=" << fmt_g(spec.fixed.omega1) << " omega2=" << fmt_g(spec.fixed.omega2)
      << " delta1=" << fmt_g(spec.fixed.delta1) << " delta2=" << fmt_g(spec.fixed.delta2)
      << " chi1=" << fmt_g(spec.geometry.chi1) << " chi2=" << fmt_g(spec.geometry.chi2)
      << " outputs=";
  bool first = true;
  for (ScanOutput o : spec.outputs) {
    if (!first) out << '+';
    out << output_name(o);
    first = false;
  }
  out << "\n";

  const bool has_absorption = spec.outputs.count(ScanOutput::absorption);
  const bool has_report = spec.outputs.count(ScanOutput::alpha) ||
                          spec.outputs.count(ScanOutput::temperature) ||
                          spec.outputs.count(ScanOutput::capture);
  const bool has_force = spec.outputs.count(ScanOutput::force);

  out << axis_name(spec.axis) << "_rad_per_s,delta1,delta2,omega1,omega2";
  if (has_absorption) out << ",absorption_per_s";
  if (has_report) out << ",alpha_per_s,H_watt,T_kelvin,regime,capture_mps,saturated";
  if (has_force) out << ",Fmax_N";
  out << ",error\n";

  for (const ScanRow& row : rows) {
    out << fmt_g(row.axis_value) << ',' << fmt_g(row.lasers.delta1) << ','
        << fmt_g(row.lasers.delta2) << ',' << fmt_g(row.lasers.omega1) << ','
        << fmt_g(row.lasers.omega2);
    if (has_absorption) {
      out << ',';
      if (row.absorption) out << fmt_g(*row.absorption);
    }
    if (has_report) write_report_columns(out, row.report);
    if (has_force) {
      out << ',';
      if (row.force_max) out << fmt_g(*row.force_max);
    }
    out << ',' << row.error << "\n";
  }
}

std::vector<double> AxisSpec::values() const {
  if (points == 1) return {start};
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) v[i] = start + (stop - start) * i / (points - 1);
  return v;
}

void OptimizeSpec::validate() const {
  if (!(omega1 >= 0) || !std::isfinite(omega1)) {
    throw invalid_argument_error("omega1 must be >= 0 and finite");
  }
  for (const AxisSpec* axis : {&delta1, &delta2, &omega2}) {
    if (axis->points == 1) {
      if (!std::isfinite(axis->start)) throw invalid_argument_error("axis value must be finite");
      continue;
    }
    if (axis->points < 3) {
      throw invalid_argument_error("optimize axes need >= 3 grid points (or a fixed scalar)");
    }
    if (!(axis->start < axis->stop)) {
      throw invalid_argument_error("optimize axis range must be non-degenerate");
    }
  }
  if (omega2.start < 0) throw invalid_argument_error("omega2 must be >= 0");
  geometry.validate();
}

OptimizeResult run_optimize(const OptimizeSpec& spec, const Species& species, int threads) {
  spec.validate();
  const std::vector<double> d1 = spec.delta1.values();
  const std::vector<double> d2 = spec.delta2.values();
  const std::vector<double> o2 = spec.omega2.values();

  OptimizeResult result;
  result.frontier.resize(d1.size() * d2.size() * o2.size());

  // delta1 slowest: linear index order implements the documented tie-break.
  parallel_for(result.frontier.size(), threads, [&](std::size_t idx) {
    const std::size_t i1 = idx / (d2.size() * o2.size());
    const std::size_t rem = idx % (d2.size() * o2.size());
    const std::size_t i2 = rem / o2.size();
    const std::size_t i3 = rem % o2.size();
    OptimizeRow& row = result.frontier[idx];
    row.lasers = {spec.omega1, o2[i3], d1[i1], d2[i2]};
    try {
      row.report = cooling_report(species, row.lasers, spec.geometry, /*with_capture=*/false);
    } catch (const error& e) {
      row.error = e.what();
    }
  });

  const OptimizeRow* best = nullptr;
  for (std::size_t idx = 0; idx < result.frontier.size(); ++idx) {
    const OptimizeRow& row = result.frontier[idx];
    if (!row.report || row.report->regime != Regime::cooling || !row.report->temperature) continue;
    if (!best || *row.report->temperature < *best->report->temperature) {
      best = &row;
      result.best_index = idx;
    }
  }
  if (best) {
    result.found = true;
    result.best = best->lasers;
    // recompute the winner with its capture range
    result.best_report = cooling_report(species, best->lasers, spec.geometry, /*with_capture=*/true);
  }
  return result;
}

namespace {

void write_axis_header(std::ostream& out, const char* name, const AxisSpec& axis) {
  out << ' ' << name << '=';
  if (axis.points == 1) {
    out << fmt_g(axis.start);
  } else {
    out << fmt_g(axis.start) << ':' << fmt_g(axis.stop) << ':' << axis.points;
  }
}

}  // namespace

void write_optimize_csv(std::ostream& out, const OptimizeSpec& spec, const Species& species,
                        const OptimizeResult& result) {
  out << "# optimize species=" << species.name << " omega1=" << fmt_g(spec.omega1);
  write_axis_header(out, "delta1", spec.delta1);
  write_axis_header(out, "delta2", spec.delta2);
  write_axis_header(out, "omega2", spec.omega2);
  out << " chi1=" << fmt_g(spec.geometry.chi1) << " chi2=" << fmt_g(spec.geometry.chi2) << "\n";
  out << "delta1,delta2,omega1,omega2,alpha_per_s,H_watt,T_kelvin,regime,capture_mps,saturated,error\n";
  for (const OptimizeRow& row : result.frontier) {
    out << fmt_g(row.lasers.delta1) << ',' << fmt_g(row.lasers.delta2) << ','
        << fmt_g(row.lasers.omega1) << ',' << fmt_g(row.lasers.omega2);
    write_report_columns(out, row.report);
    out << ',' << row.error << "\n";
  }
  if (result.found) {
    out << "# best delta1=" << fmt_g(result.best.delta1)
        << " delta2=" << fmt_g(result.best.delta2) << " omega2=" << fmt_g(result.best.omega2)
        << " T_kelvin=" << fmt_g(result.best_report.temperature.value_or(0)) << "\n";
  } else {
    out << "# no cooling found\n";
  }
}

void write_report_csv(std::ostream& out, const Species& species, const LaserConfig& lasers,
                      const CoolingReport& report) {
  out << "# species=" << species.name << "\n";
  out << "delta1,delta2,omega1,omega2,alpha_per_s,H_watt,T_kelvin,regime,capture_mps,saturated\n";
  out << fmt_g(lasers.delta1) << ',' << fmt_g(lasers.delta2) << ',' << fmt_g(lasers.omega1) << ','
      << fmt_g(lasers.omega2) << ',' << fmt_g(report.alpha) << ',' << fmt_g(report.heating) << ',';
  if (report.temperature) out << fmt_g(*report.temperature);
  out << ',' << regime_name(report.regime) << ',';
  if (report.capture) out << fmt_g(report.capture->dv);
  out << ',' << (report.saturation_warning ? '1' : '0') << "\n";
}

// --- config files -------------------------------------------------------------

namespace {

struct RawConfig {
  std::string section;
  std::map<std::string, std::string> keys;
  int section_line = 0;
};

RawConfig read_raw_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  RawConfig raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      if (!raw.section.empty()) {
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": only one [scan] or [optimize] section per file");
      }
      raw.section = s.substr(1, s.size() - 2);
      raw.section_line = line_no;
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw parse_error(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    if (raw.section.empty()) {
      throw parse_error(path + ":" + std::to_string(line_no) + ": key before [scan]/[optimize]");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (raw.keys.count(key)) {
      throw parse_error(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    raw.keys[key] = value;
  }
  if (raw.section != "scan" && raw.section != "optimize") {
    throw parse_error(path + ": expected a [scan] or [optimize] section");
  }
  return raw;
}

ScanAxis parse_axis(const std::string& value) {
  if (value == "delta1") return ScanAxis::delta1;
  if (value == "delta2") return ScanAxis::delta2;
  if (value == "two_photon") return ScanAxis::two_photon;
  if (value == "omega2") return ScanAxis::omega2;
  throw parse_error("unknown axis '" + value + "'");
}

std::set<ScanOutput> parse_outputs(const std::string& value) {
  std::set<ScanOutput> outputs;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "absorption") outputs.insert(ScanOutput::absorption);
    else if (item == "alpha") outputs.insert(ScanOutput::alpha);
    else if (item == "temperature") outputs.insert(ScanOutput::temperature);
    else if (item == "force") outputs.insert(ScanOutput::force);
    else if (item == "capture") outputs.insert(ScanOutput::capture);
    else throw parse_error("unknown output '" + item + "'");
  }
  if (outputs.empty()) throw parse_error("outputs list is empty");
  return outputs;
}

class KeyReader {
 public:
  KeyReader(const RawConfig& raw, const std::string& path) : raw_(raw), path_(path) {}

  const std::string* find(const std::string& key) {
    used_.insert(key);
    auto it = raw_.keys.find(key);
    return it == raw_.keys.end() ? nullptr : &it->second;
  }

  std::string require(const std::string& key) {
    const std::string* v = find(key);
    if (!v) throw parse_error(path_ + ": missing key '" + key + "'");
    return *v;
  }

  void finish() const {
    for (const auto& [key, value] : raw_.keys) {
      if (!used_.count(key)) {
        throw parse_error(path_ + ": unknown key '" + key + "' in [" + raw_.section + "]");
      }
    }
  }

 private:
  const RawConfig& raw_;
  std::string path_;
  std::set<std::string> used_;
};

AxisSpec parse_axis_spec(const std::string& value, const Species& species) {
  if (value.find(':') == std::string::npos) {
    return AxisSpec::fixed(parse_frequency(value, species));
  }
  FrequencyRange r = parse_frequency_range(value, species);
  return {r.start, r.stop, r.points};
}

// Config key that the axis overwrites per row (two_photon derives delta2).
std::string scanned_field_key(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::delta1: return "delta1";
    case ScanAxis::delta2:
    case ScanAxis::two_photon: return "delta2";
    case ScanAxis::omega2: return "omega2";
  }
  return {};
}

}  // namespace

ParsedConfig load_config_file(const std::string& path, const std::string& species_path) {
  RawConfig raw = read_raw_config(path);
  KeyReader keys(raw, path);

  ParsedConfig config;
  config.species = load_species(keys.require("species"), species_path);
  const Species& sp = config.species;

  EmissionGeometry geometry;
  if (const std::string* v = keys.find("chi1")) geometry.chi1 = parse_number(*v, "chi1");
  if (const std::string* v = keys.find("chi2")) geometry.chi2 = parse_number(*v, "chi2");
  geometry.validate();

  if (raw.section == "scan") {
    config.kind = ParsedConfig::Kind::scan;
    ScanSpec& scan = config.scan;
    scan.species_name = sp.name;
    scan.geometry = geometry;
    scan.axis = parse_axis(keys.require("axis"));
    FrequencyRange range = parse_frequency_range(keys.require("range"), sp);
    if (range.points < 2) throw parse_error(path + ": scan range needs points >= 2");
    scan.start = range.start;
    scan.stop = range.stop;
    scan.points = range.points;
    if (const std::string* v = keys.find("outputs")) scan.outputs = parse_outputs(*v);

    // fixed laser template; the scanned field must not be fixed as well
    struct Field { const char* key; double LaserConfig::*member; };
    static const Field fields[] = {{"omega1", &LaserConfig::omega1},
                                   {"omega2", &LaserConfig::omega2},
                                   {"delta1", &LaserConfig::delta1},
                                   {"delta2", &LaserConfig::delta2}};
    const std::string scanned = scanned_field_key(scan.axis);
    for (const Field& f : fields) {
      const std::string* v = keys.find(f.key);
      if (!v) continue;
      if (f.key == scanned) {
        throw parse_error(path + ": '" + scanned + "' is scanned by axis " +
                          axis_name(scan.axis) + " and cannot be fixed too");
      }
      scan.fixed.*f.member = parse_frequency(*v, sp);
    }
    keys.finish();
    scan.validate();
  } else {
    config.kind = ParsedConfig::Kind::optimize;
    OptimizeSpec& opt = config.optimize;
    opt.species_name = sp.name;
    opt.geometry = geometry;
    opt.omega1 = parse_frequency(keys.require("omega1"), sp);
    opt.delta1 = parse_axis_spec(keys.require("delta1"), sp);
    opt.delta2 = parse_axis_spec(keys.require("delta2"), sp);
    opt.omega2 = parse_axis_spec(keys.require("omega2"), sp);
    keys.finish();
    opt.validate();
  }
  return config;
}

}  // namespace cascade
