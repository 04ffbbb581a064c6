#include "cascade/bloch.hpp"

#include <cmath>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"

namespace cascade {

using complexd = std::complex<double>;

void LaserConfig::validate() const {
  if (!(omega1 >= 0) || !(omega2 >= 0)) {
    throw invalid_argument_error("Rabi frequencies must be >= 0");
  }
  for (double x : {omega1, omega2, delta1, delta2}) {
    if (!std::isfinite(x)) throw invalid_argument_error("laser parameters must be finite");
  }
}

namespace {

inline int vec_index(int row, int col) { return row + 3 * col; }

// L += -i (I (x) H - H^T (x) I), H real symmetric here.
void add_hamiltonian(Liouvillian& L, const Eigen::Matrix3d& H) {
  const complexd mi(0.0, -1.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        // (H rho)_{ij} = H_{ik} rho_{kj}
        L(vec_index(i, j), vec_index(k, j)) += mi * H(i, k);
        // -(rho H)_{ij} = -rho_{ik} H_{kj}
        L(vec_index(i, j), vec_index(i, k)) -= mi * H(k, j);
      }
    }
  }
}

// L += gamma [ (c)(x)(c) - 1/2 (I (x) c^dag c) - 1/2 ((c^dag c)^T (x) I) ]
// for the jump |to><from| (real), rate gamma.
void add_decay(Liouvillian& L, int from, int to, double gamma) {
  if (gamma == 0) return;
  // c rho c^dag: rho_{from,from} feeds (to,to)
  L(vec_index(to, to), vec_index(from, from)) += gamma;
  // anticommutator: -gamma/2 on every entry with a `from` index
  for (int j = 0; j < 3; ++j) {
    L(vec_index(from, j), vec_index(from, j)) -= 0.5 * gamma;
    L(vec_index(j, from), vec_index(j, from)) -= 0.5 * gamma;
  }
}

}  // namespace

Generator build_generator(const Species& species, const LaserConfig& lasers, double velocity) {
  lasers.validate();
  if (!std::isfinite(velocity)) {
    throw invalid_argument_error("velocity must be finite");
  }
  if (std::abs(velocity) >= speed_of_light / 100.0) {
    throw invalid_argument_error("velocity outside the non-relativistic validity range");
  }

  const double g1 = species.gamma1;
  const double d1p = (lasers.delta1 - species.k1 * velocity) / g1;
  const double d2p = (lasers.delta2 - species.k2 * velocity) / g1;
  const double o1 = lasers.omega1 / g1;
  const double o2 = lasers.omega2 / g1;

  Eigen::Matrix3d H;
  H << 0.0,      o1 / 2,  0.0,
       o1 / 2,  -d1p,     o2 / 2,
       0.0,      o2 / 2, -(d1p + d2p);

  Generator gen;
  gen.matrix.setZero();
  add_hamiltonian(gen.matrix, H);
  add_decay(gen.matrix, 1, 0, 1.0);                  // gamma1 == 1 in natural units
  add_decay(gen.matrix, 2, 1, species.gamma2 / g1);
  gen.species = species;
  gen.lasers = lasers;
  gen.velocity = velocity;
  return gen;
}

DensityMatrix apply_generator(const Generator& gen, const DensityMatrix& rho) {
  Eigen::Matrix<complexd, 9, 1> v;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) v(vec_index(i, j)) = rho(i, j);
  Eigen::Matrix<complexd, 9, 1> w = gen.matrix * v;
  DensityMatrix out;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) out(i, j) = w(vec_index(i, j));
  return out;
}

SteadyState steady_state(const Generator& gen) {
  if (gen.species.gamma1 <= 0 && gen.species.gamma2 <= 0) {
    throw invalid_argument_error("steady state requires at least one nonzero decay rate");
  }

  // Replace the d(rho_00)/dt row with the trace constraint.
  Eigen::Matrix<complexd, 9, 9> M = gen.matrix;
  M.row(0).setZero();
  M(0, vec_index(0, 0)) = 1.0;
  M(0, vec_index(1, 1)) = 1.0;
  M(0, vec_index(2, 2)) = 1.0;
  Eigen::Matrix<complexd, 9, 1> b = Eigen::Matrix<complexd, 9, 1>::Zero();
  b(0) = 1.0;

  auto singular = [&]() -> solver_error {
    Eigen::JacobiSVD<Eigen::Matrix<complexd, 9, 9>> svd(M);
    double cond = svd.singularValues()(0) / svd.singularValues()(8);
    return solver_error(
        "steady state is numerically singular (non-unique or ill-conditioned); "
        "condition estimate " + std::to_string(cond), cond);
  };

  // Rank-revealing factorization: a rank-deficient system here is consistent
  // (several steady states), so a residual test alone cannot expose it.
  Eigen::FullPivLU<Eigen::Matrix<complexd, 9, 9>> lu(M);
  if (!lu.isInvertible()) throw singular();
  Eigen::Matrix<complexd, 9, 1> x = lu.solve(b);

  DensityMatrix rho;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) rho(i, j) = x(vec_index(i, j));
  rho = 0.5 * (rho + rho.adjoint().eval());
  const complexd tr = rho.trace();
  if (!rho.allFinite() || std::abs(tr) < 0.5) throw singular();
  rho /= tr.real();
  if (apply_generator(gen, rho).cwiseAbs().maxCoeff() > 1e-10) throw singular();

  SteadyState out;
  out.rho = rho;
  out.saturated = rho(1, 1).real() > 0.1;
  return out;
}

std::array<double, 3> populations(const DensityMatrix& rho) {
  return {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real()};
}

}  // namespace cascade
