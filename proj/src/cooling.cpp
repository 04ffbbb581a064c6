#include "cascade/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"

namespace cascade {

namespace {

// Rate samples keyed by velocity, so refinement levels reuse earlier solves.
class RateSampler {
 public:
  RateSampler(const Species& species, const LaserConfig& lasers)
      : species_(species), lasers_(lasers) {}

  RatePoint at(double v) {
    auto it = cache_.find(v);
    if (it != cache_.end()) return it->second;
    RatePoint pt = scattering_rates(species_, lasers_, v);
    cache_.emplace(v, pt);
    return pt;
  }

 private:
  const Species& species_;
  const LaserConfig& lasers_;
  std::map<double, RatePoint> cache_;
};

struct DerivativePair {
  double d1, d2;
};

}  // namespace

RateDerivatives rate_derivatives_at_zero(const Species& species, const LaserConfig& lasers) {
  RateSampler sampler(species, lasers);

  // Momentum step whose Doppler shift is 1e-3 gamma1.
  const double h0 = 1e-3 * species.gamma1 * species.mass / species.k1;

  auto central = [&](double h) -> DerivativePair {
    RatePoint plus = sampler.at(h / species.mass);
    RatePoint minus = sampler.at(-h / species.mass);
    return {(plus.r1 - minus.r1) / (2 * h), (plus.r2 - minus.r2) / (2 * h)};
  };
  auto richardson = [&](double h) -> DerivativePair {
    DerivativePair full = central(h);
    DerivativePair half = central(h / 2);
    return {(4 * half.d1 - full.d1) / 3, (4 * half.d2 - full.d2) / 3};
  };

  RatePoint origin = sampler.at(0.0);
  const double floor1 =
      1e-9 * std::max(std::abs(origin.r1), 1e-300) * species.k1 / (species.mass * species.gamma1);
  const double floor2 =
      1e-9 * std::max(std::abs(origin.r2), 1e-300) * species.k1 / (species.mass * species.gamma1);

  DerivativePair prev = richardson(h0);
  double h = h0;
  for (int level = 0; level < 6; ++level) {
    h /= 2;
    DerivativePair cur = richardson(h);
    const double diff1 = std::abs(cur.d1 - prev.d1);
    const double diff2 = std::abs(cur.d2 - prev.d2);
    const bool ok1 = diff1 <= std::max(1e-3 * std::max(std::abs(cur.d1), std::abs(prev.d1)), floor1);
    const bool ok2 = diff2 <= std::max(1e-3 * std::max(std::abs(cur.d2), std::abs(prev.d2)), floor2);
    if (ok1 && ok2) {
      return {cur.d1, cur.d2, diff1, diff2};
    }
    prev = cur;
  }
  DerivativePair last = prev;
  DerivativePair before = richardson(h * 2);
  throw convergence_error(
      "rate derivative at p=0 did not converge (feature narrower than the step); "
      "last estimates dR1/dp = " + std::to_string(before.d1) + " vs " + std::to_string(last.d1),
      before.d1, last.d1);
}

double rate_derivative_at_zero(const Species& species, const LaserConfig& lasers,
                               RateChannel which) {
  RateDerivatives d = rate_derivatives_at_zero(species, lasers);
  return which == RateChannel::r1 ? d.dr1_dp : d.dr2_dp;
}

namespace {

double alpha_from(const Species& species, const RateDerivatives& d) {
  return -2 * hbar * species.k1 * d.dr1_dp - 2 * hbar * (species.k1 + species.k2) * d.dr2_dp;
}

double alpha_uncertainty_from(const Species& species, const RateDerivatives& d) {
  return 2 * hbar * species.k1 * d.err1 + 2 * hbar * (species.k1 + species.k2) * d.err2;
}

double heating_from_rates(const Species& species, const EmissionGeometry& geometry, double r1,
                          double r2) {
  r1 = std::max(r1, 0.0);
  r2 = std::max(r2, 0.0);
  const double e1 = (1 + geometry.chi1) * hbar * hbar * species.k1 * species.k1 / species.mass;
  const double e2 = (1 + geometry.chi2) * hbar * hbar * species.k2 * species.k2 / species.mass;
  return r1 * e1 + 2 * r2 * (e1 + e2);
}

}  // namespace

double cooling_rate(const Species& species, const LaserConfig& lasers) {
  return alpha_from(species, rate_derivatives_at_zero(species, lasers));
}

double heating_rate(const Species& species, const LaserConfig& lasers,
                    const EmissionGeometry& geometry) {
  geometry.validate();
  RatePoint origin = scattering_rates(species, lasers, 0.0);
  return heating_from_rates(species, geometry, origin.r1, origin.r2);
}

namespace {

CaptureRange capture_range_prechecked(const Species& species, const LaserConfig& lasers,
                                      double vmax, int points) {
  if (vmax <= 0) vmax = default_velocity_halfwidth(species, lasers);
  const int half = std::max(points / 2, 8);
  const double dv = vmax / half;

  std::vector<double> vs(half);
  std::vector<double> fs(half);
  for (int i = 0; i < half; ++i) {
    vs[i] = dv * (i + 1);
    fs[i] = force(species, lasers, vs[i]);
  }
  double fmax = 0;
  for (double f : fs) fmax = std::max(fmax, std::abs(f));
  if (fmax == 0) return {vmax, true};
  const double threshold = 0.1 * fmax;

  auto force_at = [&](double v) { return force(species, lasers, v); };
  auto bisect = [&](double lo, double hi, auto condition) {
    // condition(v) false at lo, true at hi
    for (int iter = 0; iter < 60 && (hi - lo) > 1e-3 * hi; ++iter) {
      double mid = 0.5 * (lo + hi);
      (condition(mid) ? hi : lo) = mid;
    }
    return hi;
  };

  bool armed = false;
  double prev_v = 0;
  for (int i = 0; i < half; ++i) {
    const bool damping_failed = fs[i] >= 0;
    const bool fell_below = armed && std::abs(fs[i]) < threshold;
    if (damping_failed || fell_below) {
      const double lo = (i == 0) ? dv * 0.5 : prev_v;  // force(0)=0; start inside the cell
      double boundary = std::numeric_limits<double>::infinity();
      if (damping_failed) {
        boundary = std::min(boundary,
                            bisect(lo, vs[i], [&](double v) { return force_at(v) >= 0; }));
      }
      if (fell_below) {
        boundary = std::min(
            boundary, bisect(lo, vs[i], [&](double v) { return std::abs(force_at(v)) < threshold; }));
      }
      return {boundary, false};
    }
    if (std::abs(fs[i]) >= threshold) armed = true;
    prev_v = vs[i];
  }
  return {vmax, true};
}

}  // namespace

CaptureRange capture_range(const Species& species, const LaserConfig& lasers, double vmax,
                           int points) {
  if (!(cooling_rate(species, lasers) > 0)) {
    throw invalid_argument_error("capture range requires a damping force at v = 0 (alpha > 0)");
  }
  return capture_range_prechecked(species, lasers, vmax, points);
}

CoolingReport cooling_report(const Species& species, const LaserConfig& lasers,
                             const EmissionGeometry& geometry, bool with_capture) {
  geometry.validate();
  RateDerivatives deriv = rate_derivatives_at_zero(species, lasers);

  SteadyState origin = steady_state(build_generator(species, lasers, 0.0));
  auto [p0, p1, p2] = populations(origin.rho);
  const double r1 = species.gamma1 * p1 - species.gamma2 * p2;
  const double r2 = species.gamma2 * p2;

  CoolingReport report;
  report.alpha = alpha_from(species, deriv);
  report.alpha_uncertainty = alpha_uncertainty_from(species, deriv);
  report.heating = heating_from_rates(species, geometry, r1, r2);
  report.saturation_warning = origin.saturated;

  if (report.alpha > report.alpha_uncertainty) {
    report.regime = Regime::cooling;
    report.temperature = report.heating / (k_boltzmann * report.alpha);
  } else if (report.alpha < -report.alpha_uncertainty) {
    report.regime = Regime::heating;
  } else {
    report.regime = Regime::neutral;
  }

  if (with_capture && report.regime == Regime::cooling) {
    report.capture = capture_range_prechecked(species, lasers, 0, 401);
  }
  return report;
}

double evolve_energy_linear(const CoolingReport& report, double energy0, double time) {
  if (report.alpha == 0) {
    throw invalid_argument_error("linear energy evolution requires alpha != 0");
  }
  const double fixed_point = report.heating / (2 * report.alpha);
  return fixed_point + (energy0 - fixed_point) * std::exp(-2 * report.alpha * time);
}

void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw invalid_argument_error("quadrature order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i + 1 < order; ++i) {
    const double b = std::sqrt((i + 1) / 2.0);
    jacobi(i, i + 1) = b;
    jacobi(i + 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes.resize(order);
  weights.resize(order);
  const double sqrt_pi = std::sqrt(pi);
  for (int i = 0; i < order; ++i) {
    nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    weights[i] = sqrt_pi * v0 * v0;
  }
}

namespace {

// Right-hand side of the full energy equation under the Gaussian ansatz.
class EnergyFlow {
 public:
  EnergyFlow(const Species& species, const LaserConfig& lasers, const EmissionGeometry& geometry,
             int order)
      : species_(species), lasers_(lasers), geometry_(geometry) {
    set_order(order);
  }

  int order() const { return order_; }

  void set_order(int order) {
    order_ = order;
    gauss_hermite(order, nodes_, weights_);
  }

  double rhs(double energy) const { return rhs_with(order_, nodes_, weights_, energy); }

  // Quadrature self-check at this energy: order vs doubled order.
  bool validated(double energy) const {
    std::vector<double> n2, w2;
    gauss_hermite(2 * order_, n2, w2);
    const double a = rhs(energy);
    const double b = rhs_with(2 * order_, n2, w2, energy);
    const double scale = std::max({std::abs(a), std::abs(b), heating_floor(energy)});
    return std::abs(a - b) <= 1e-6 * std::max(scale, 1e-300);
  }

 private:
  double heating_floor(double energy) const {
    // sigma_i >= 0; the heating part never cancels, so it sets the scale.
    std::vector<RatePoint> pts = sample(order_, nodes_, energy);
    double s1 = 0, s2 = 0;
    for (int j = 0; j < order_; ++j) {
      s1 += weights_[j] * std::max(pts[j].r1, 0.0);
      s2 += weights_[j] * std::max(pts[j].r2, 0.0);
    }
    const double inv_sqrt_pi = 1.0 / std::sqrt(pi);
    return heating_from_rates(species_, geometry_, s1 * inv_sqrt_pi, s2 * inv_sqrt_pi);
  }

  std::vector<RatePoint> sample(int order, const std::vector<double>& nodes,
                                double energy) const {
    const double sigma_p = std::sqrt(std::max(2 * species_.mass * energy, 0.0));
    std::vector<RatePoint> pts(order);
    for (int j = 0; j < order; ++j) {
      const double p = std::sqrt(2.0) * sigma_p * nodes[j];
      pts[j] = scattering_rates(species_, lasers_, p / species_.mass);
    }
    return pts;
  }

  double rhs_with(int order, const std::vector<double>& nodes, const std::vector<double>& weights,
                  double energy) const {
    const double inv_sqrt_pi = 1.0 / std::sqrt(pi);
    std::vector<RatePoint> pts = sample(order, nodes, energy);

    // Symmetric nodes: locate the mirror sample for R(-p).
    auto mirror = [&](int j) {
      // nodes are sorted ascending and symmetric about 0
      return order - 1 - j;
    };

    double drift = 0, s1 = 0, s2 = 0;
    const double sigma_p = std::sqrt(std::max(2 * species_.mass * energy, 0.0));
    for (int j = 0; j < order; ++j) {
      const double p = std::sqrt(2.0) * sigma_p * nodes[j];
      const RatePoint& plus = pts[j];
      const RatePoint& minus = pts[mirror(j)];
      drift += weights[j] * (hbar * p / species_.mass) *
               (species_.k1 * (plus.r1 - minus.r1) +
                (species_.k1 + species_.k2) * (plus.r2 - minus.r2));
      s1 += weights[j] * plus.r1;
      s2 += weights[j] * plus.r2;
    }
    drift *= inv_sqrt_pi;
    s1 *= inv_sqrt_pi;
    s2 *= inv_sqrt_pi;
    return drift + heating_from_rates(species_, geometry_, s1, s2);
  }

  const Species& species_;
  const LaserConfig& lasers_;
  const EmissionGeometry& geometry_;
  int order_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace

std::vector<EnergySample> evolve_energy_full(const Species& species, const LaserConfig& lasers,
                                             const EmissionGeometry& geometry, double energy0,
                                             std::span<const double> time_grid,
                                             int quadrature_order) {
  geometry.validate();
  if (!(energy0 > 0)) throw invalid_argument_error("initial energy must be positive");
  if (time_grid.empty()) throw invalid_argument_error("time grid is empty");
  for (size_t i = 0; i < time_grid.size(); ++i) {
    if (time_grid[i] < 0 || (i > 0 && time_grid[i] <= time_grid[i - 1])) {
      throw invalid_argument_error("time grid must be non-negative and strictly increasing");
    }
  }

  EnergyFlow flow(species, lasers, geometry, quadrature_order);
  double validated_up_to = energy0;
  auto ensure_valid = [&](double energy) {
    if (flow.validated(energy)) return;
    flow.set_order(2 * flow.order());
    if (!flow.validated(energy)) {
      throw convergence_error(
          "Gauss-Hermite quadrature did not converge after doubling the order "
          "(rate features narrower than the momentum distribution resolution)",
          flow.rhs(energy), 0.0);
    }
  };
  ensure_valid(energy0);

  // Dormand-Prince 5(4), FSAL.
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B5[7] = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static const double B4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  const double rtol = 1e-8;

  std::vector<EnergySample> samples;
  samples.reserve(time_grid.size());

  double t = 0;
  double energy = energy0;
  double k_first = flow.rhs(energy);
  size_t next_output = 0;
  if (time_grid[0] == 0) {
    samples.push_back({0.0, energy0});
    ++next_output;
  }

  const double t_end = time_grid.back();
  double h = t_end / 1000;
  {
    // crude initial step from the local rate of change
    const double scale = std::abs(k_first);
    if (scale > 0) h = std::min(h, 0.01 * energy / scale);
    if (!(h > 0)) h = t_end / 1000;
  }

  int max_steps = 2000000;
  while (t < t_end && max_steps-- > 0) {
    h = std::min(h, t_end - t);
    double k[7];
    k[0] = k_first;
    bool finite = true;
    for (int stage = 1; stage < 7; ++stage) {
      double y = energy;
      for (int j = 0; j < stage; ++j) y += h * A[stage][j] * k[j];
      if (!(y == y)) { finite = false; break; }
      k[stage] = flow.rhs(std::max(y, 0.0));
    }
    if (!finite) {
      h *= 0.5;
      continue;
    }
    double y5 = energy, y4 = energy;
    for (int j = 0; j < 7; ++j) {
      y5 += h * B5[j] * k[j];
      y4 += h * B4[j] * k[j];
    }
    const double scale = rtol * std::max({std::abs(energy), std::abs(y5), 1e-300});
    const double err = std::abs(y5 - y4) / scale;
    if (err <= 1.0) {
      const double t_new = t + h;
      // outputs landing inside the accepted step: cubic Hermite in (E, dE/dt)
      while (next_output < time_grid.size() && time_grid[next_output] <= t_new + 1e-15 * t_end) {
        const double s = (time_grid[next_output] - t) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        const double value = h00 * energy + h10 * h * k[0] + h01 * y5 + h11 * h * k[6];
        samples.push_back({time_grid[next_output], std::max(value, 0.0)});
        ++next_output;
      }
      t = t_new;
      energy = std::max(y5, 0.0);
      k_first = k[6];  // FSAL
      if (next_output >= time_grid.size()) break;
      if (energy > 2 * validated_up_to) {
        ensure_valid(energy);
        validated_up_to = energy;
      }
    }
    const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
    if (!(h > 0)) {
      throw convergence_error("time step underflow in energy evolution", energy, t);
    }
  }
  if (next_output < time_grid.size()) {
    throw convergence_error("energy evolution exceeded the step budget", energy, t);
  }
  return samples;
}

}  // namespace cascade
