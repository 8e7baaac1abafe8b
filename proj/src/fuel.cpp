#include "pce/fuel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "pce/errors.hpp"

namespace pce {

namespace {

void validate_common(double omega, double J, double lambda) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    fail(ErrorKind::InvalidArgument, "omega must be positive");
  }
  if (!(J >= 0.0) || !std::isfinite(J)) {
    fail(ErrorKind::InvalidArgument, "J must be non-negative");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidArgument, "lambda must be non-negative");
  }
}

constexpr double kCoherenceTol = 1e-10;

}  // namespace

void StarModelParams::validate() const {
  validate_common(omega, J, lambda);
  if (N < 1) fail(ErrorKind::InvalidArgument, "star model needs N >= 1");
  if (N > max_outer_spins) {
    fail(ErrorKind::InvalidArgument,
         "star model N=" + std::to_string(N) + " exceeds the memory cap of " +
             std::to_string(max_outer_spins) + " outer spins");
  }
}

void CollectiveModelParams::validate() const {
  validate_common(omega, J, lambda);
  const double twice = 2.0 * S;
  if (!(twice >= 1.0) || std::abs(twice - std::round(twice)) > 1e-12) {
    fail(ErrorKind::InvalidSpin,
         "spin magnitude must be a positive half-integer, got " +
             show(S));
  }
}

CentralSpinState CentralSpinState::thermal(double omega, double temperature) {
  if (!(omega > 0.0) || !(temperature > 0.0)) {
    fail(ErrorKind::InvalidArgument, "thermal fuel needs omega > 0 and T > 0");
  }
  return {1.0 / (1.0 + std::exp(omega / temperature)), omega};
}

double GibbsState::log_partition() const {
  return std::log(shifted_partition) - ground_energy / temperature;
}

Operator build_star_hamiltonian(const StarModelParams& p) {
  p.validate();
  const int sites = p.N + 1;
  const HilbertDims dims(std::vector<int>(sites, 2));
  const Eigen::Index d = dims.total();
  Matrix h = Matrix::Zero(d, d);

  // Bit (sites-1-k) of the flat index is site k; bit value 0 is spin up.
  auto up = [&](Eigen::Index state, int site) {
    return ((state >> (sites - 1 - site)) & 1) == 0;
  };
  for (Eigen::Index s = 0; s < d; ++s) {
    const double z0 = up(s, 0) ? 1.0 : -1.0;
    double diag = 0.5 * p.omega * z0;
    for (int i = 1; i < sites; ++i) {
      const double zi = up(s, i) ? 1.0 : -1.0;
      diag += 0.5 * p.omega * zi + 0.25 * p.J * p.lambda * z0 * zi;
      if (z0 != zi) {
        // sigma_x sigma_x + sigma_y sigma_y = 2 (s+ s- + s- s+) swaps the pair
        const Eigen::Index flipped =
            s ^ (Eigen::Index{1} << (sites - 1)) ^ (Eigen::Index{1} << (sites - 1 - i));
        h(flipped, s) += 0.5 * p.J;
      }
    }
    h(s, s) += diag;
  }
  return {dims, std::move(h)};
}

Operator build_collective_hamiltonian(const CollectiveModelParams& p) {
  p.validate();
  const SpinOperators tape = pauli();
  const SpinOperators big = spin_operators(p.S);
  const Operator id_tape = identity(tape.z.dims());
  const Operator id_big = identity(big.z.dims());
  return 0.5 * p.omega * kron(tape.z, id_big) + p.omega * kron(id_tape, big.z) +
         0.5 * p.J *
             (kron(tape.x, big.x) + kron(tape.y, big.y) +
              p.lambda * kron(tape.z, big.z));
}

GibbsState gibbs_state(const Operator& hamiltonian, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    fail(ErrorKind::InvalidArgument, "temperature must be positive and finite");
  }
  const double defect = hamiltonian.hermiticity_defect();
  if (defect > kHermitianTol) {
    fail(ErrorKind::NonHermitian,
         "Hamiltonian is not Hermitian (defect " + show(defect) + ")");
  }
  const Matrix& h = hamiltonian.matrix();

  auto boltzmann = [temperature](const Eigen::VectorXd& energies) {
    const double e0 = energies.minCoeff();
    Eigen::VectorXd w = (-(energies.array() - e0) / temperature).exp().matrix();
    const double z = w.sum();
    return std::tuple{Eigen::VectorXd(w / z), e0, z};
  };

  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    const auto [w, e0, z] = boltzmann(es.eigenvalues());
    return {DensityMatrix::from_eigensystem(hamiltonian.dims(), es.eigenvectors(), w),
            e0, z, temperature};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto [w, e0, z] = boltzmann(es.eigenvalues());
  return {DensityMatrix::from_eigensystem(hamiltonian.dims(), es.eigenvectors(), w),
          e0, z, temperature};
}

CentralSpinState central_spin_state(const FuelModel& model,
                                    double bath_temperature) {
  const auto [hamiltonian, omega] = std::visit(
      [](const auto& p) -> std::pair<Operator, double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StarModelParams>) {
          return {build_star_hamiltonian(p), p.omega};
        } else {
          return {build_collective_hamiltonian(p), p.omega};
        }
      },
      model);
  const GibbsState gibbs = gibbs_state(hamiltonian, bath_temperature);
  const DensityMatrix tape = partial_trace(gibbs.rho, {0});
  const double coherence = std::abs(tape.matrix()(0, 1));
  if (coherence > kCoherenceTol) {
    fail(ErrorKind::ModelViolation,
         "reduced tape-spin state has coherence " + show(coherence));
  }
  return {tape.matrix()(0, 0).real(), omega};
}

EffectiveTemperature effective_temperature(const CentralSpinState& c) {
  if (!(c.p_e >= 0.0) || c.p_e > 1.0) {
    fail(ErrorKind::InvalidArgument, "p_e must lie in [0, 1]");
  }
  if (c.p_e >= 0.5) {
    fail(ErrorKind::PopulationInversion,
         "p_e=" + show(c.p_e) +
             " >= 1/2 admits no positive effective temperature");
  }
  if (c.p_e == 0.0) return {0.0};
  return {-c.omega / std::log(c.p_e / c.p_g())};
}

double carnot_efficiency(double hot_temperature, double bath_temperature) {
  if (!(bath_temperature > 0.0)) {
    fail(ErrorKind::InvalidArgument, "bath temperature must be positive");
  }
  // Equal temperatures computed through an eigensolver land within round-off.
  if (hot_temperature < bath_temperature * (1.0 - 1e-12)) {
    fail(ErrorKind::NegativeEfficiency,
         "hot temperature below bath temperature; the engine cannot run");
  }
  if (std::isinf(hot_temperature)) return 1.0;
  return std::max(0.0, 1.0 - bath_temperature / hot_temperature);
}

}  // namespace pce
