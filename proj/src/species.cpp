#include "cascade/species.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"
#include "text_util.hpp"

namespace cascade {

namespace {

void require_positive(double value, const std::string& field) {
  if (!(value > 0) || !std::isfinite(value)) {
    throw invalid_argument_error("species field '" + field + "' must be positive and finite");
  }
}

}  // namespace

Species Species::make(std::string name, double mass_kg, double lambda1_m,
                      double lambda2_m, double gamma1_rad_s, double gamma2_rad_s) {
  require_positive(mass_kg, "mass");
  require_positive(lambda1_m, "lambda1");
  require_positive(lambda2_m, "lambda2");
  require_positive(gamma1_rad_s, "gamma1");
  if (!(gamma2_rad_s >= 0) || !std::isfinite(gamma2_rad_s)) {
    throw invalid_argument_error("species field 'gamma2' must be >= 0 and finite");
  }
  Species s;
  s.name = std::move(name);
  s.mass = mass_kg;
  s.lambda1 = lambda1_m;
  s.lambda2 = lambda2_m;
  s.gamma1 = gamma1_rad_s;
  s.gamma2 = gamma2_rad_s;
  s.k1 = two_pi / lambda1_m;
  s.k2 = two_pi / lambda2_m;
  return s;
}

Species Species::with_gamma2(double gamma2_rad_s) const {
  return make(name, mass, lambda1, lambda2, gamma1, gamma2_rad_s);
}

void EmissionGeometry::validate() const {
  if (!(chi1 >= 0 && chi1 <= 1) || !(chi2 >= 0 && chi2 <= 1)) {
    throw invalid_argument_error("emission geometry chi factors must lie in [0, 1]");
  }
}

double doppler_limit(double gamma_rad_s) {
  require_positive(gamma_rad_s, "gamma");
  return hbar * gamma_rad_s / (2.0 * k_boltzmann);
}

NaturalUnits natural_units(const Species& species) {
  NaturalUnits u;
  u.frequency = species.gamma1;
  u.velocity = species.gamma1 / species.k1;
  u.momentum = species.mass * u.velocity;
  u.energy = hbar * species.gamma1;
  return u;
}

namespace {

using detail::trim;

double parse_decimal(const std::string& token, const std::string& where) {
  std::optional<double> value = detail::parse_double(token);
  if (!value) throw parse_error(where + ": malformed number '" + token + "'");
  return *value;
}

Species record_to_species(const std::map<std::string, std::string>& record,
                          const std::string& where) {
  static const char* required[] = {"name",       "mass_u",
                                   "lambda1_nm", "lambda2_nm",
                                   "gamma1_over_2pi_MHz", "gamma2_over_2pi_MHz"};
  for (const char* key : required) {
    if (!record.count(key)) {
      throw parse_error(where + ": missing field '" + std::string(key) + "'");
    }
  }
  auto num = [&](const char* key) {
    double v = parse_decimal(record.at(key), where + " field '" + key + "'");
    if (!(v > 0)) {
      throw parse_error(where + ": field '" + std::string(key) + "' must be positive");
    }
    return v;
  };
  // Table values are ordinary frequencies (gamma/2pi) and nm; store angular
  // rad/s and metres.
  return Species::make(record.at("name"),
                       num("mass_u") * atomic_mass_unit,
                       num("lambda1_nm") * 1e-9,
                       num("lambda2_nm") * 1e-9,
                       num("gamma1_over_2pi_MHz") * 1e6 * two_pi,
                       num("gamma2_over_2pi_MHz") * 1e6 * two_pi);
}

}  // namespace

std::vector<Species> parse_species_stream(std::istream& in, const std::string& origin) {
  std::vector<Species> out;
  std::map<std::string, std::string> record;
  bool in_record = false;
  int line_no = 0;
  int record_line = 0;

  auto flush = [&]() {
    if (!in_record) return;
    std::string where = origin + ":" + std::to_string(record_line);
    out.push_back(record_to_species(record, where));
    record.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s == "[species]") {
      flush();
      in_record = true;
      record_line = line_no;
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw parse_error(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    if (!in_record) {
      throw parse_error(origin + ":" + std::to_string(line_no) +
                        ": key outside a [species] record");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    static const char* known[] = {"name",       "mass_u",
                                  "lambda1_nm", "lambda2_nm",
                                  "gamma1_over_2pi_MHz", "gamma2_over_2pi_MHz"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) {
      throw parse_error(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (record.count(key)) {
      throw parse_error(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    record[key] = value;
  }
  flush();
  if (out.empty()) {
    throw parse_error(origin + ": no [species] records found");
  }
  return out;
}

std::vector<Species> load_species_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("cannot open species file '" + path + "'");
  }
  return parse_species_stream(in, path);
}

const std::string& bundled_species_text() {
  // Table values for the three cascade systems; masses are standard
  // atomic-weight values from atomic-mass tables, not spectroscopy data.
  static const std::string text = R"(# Bundled cascade species data.
# mass_u entries are standard atomic-mass-table values (external constants).
[species]
name = Mg
mass_u = 24.305
lambda1_nm = 285.29
lambda2_nm = 880.92
gamma1_over_2pi_MHz = 78.8
gamma2_over_2pi_MHz = 2.0

[species]
name = Ca
mass_u = 40.078
lambda1_nm = 422.79
lambda2_nm = 1034.66
gamma1_over_2pi_MHz = 34.7
gamma2_over_2pi_MHz = 5.3

[species]
name = Cs
mass_u = 132.905
lambda1_nm = 852.12
lambda2_nm = 563.68
gamma1_over_2pi_MHz = 5.2
gamma2_over_2pi_MHz = 0.49
)";
  return text;
}

namespace {

std::vector<Species> resolve_table(const std::string& path) {
  if (!path.empty()) return load_species_file(path);
  if (const char* env = std::getenv("CASCADE_COOL_SPECIES_PATH"); env && *env) {
    return load_species_file(env);
  }
  std::istringstream in(bundled_species_text());
  return parse_species_stream(in, "<bundled>");
}

}  // namespace

Species load_species(const std::string& name, const std::string& path) {
  for (const Species& s : resolve_table(path)) {
    if (s.name == name) return s;
  }
  throw invalid_argument_error("unknown species '" + name + "'");
}

std::vector<std::string> species_names(const std::string& path) {
  std::vector<std::string> names;
  for (const Species& s : resolve_table(path)) names.push_back(s.name);
  return names;
}

}  // namespace cascade
