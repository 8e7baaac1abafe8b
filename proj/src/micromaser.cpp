#include "pce/micromaser.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "pce/errors.hpp"

namespace pce {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
  }
}

// Population of the top Fock level for a truncated geometric distribution
// with ratio x = P(n+1)/P(n).
double geometric_tail(double x, int n_max) {
  if (x <= 0.0) return 0.0;
  return std::pow(x, n_max) * (1.0 - x) / (1.0 - std::pow(x, n_max + 1));
}

Matrix atom_state(const CentralSpinState& fuel) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = fuel.p_e;
  m(1, 1) = fuel.p_g();
  return m;
}

Matrix kron2(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

MicromaserParams MicromaserParams::from_lab_units(
    double omega_over_2pi_hz, double Q, double gamma_over_2pi_hz,
    double g_over_pi_hz, double tau_s, double N_ex, int n_max,
    double omega_over_T_b) {
  require_positive(omega_over_2pi_hz, "Omega/2pi");
  require_positive(Q, "Q");
  MicromaserParams p;
  p.Omega = kTwoPi * omega_over_2pi_hz;
  p.kappa = p.Omega / Q;
  p.gamma = kTwoPi * gamma_over_2pi_hz;
  p.g = std::numbers::pi * g_over_pi_hz;
  p.tau = tau_s;
  p.N_ex = N_ex;
  p.n_max = n_max;
  p.omega_over_T_b = omega_over_T_b;
  return p;
}

MicromaserParams MicromaserParams::reference() {
  return from_lab_units(50e9, 2e10, 33.3, 50e3, 9.5e-6, 6500.0);
}

void MicromaserParams::validate() const {
  require_positive(Omega, "Omega");
  require_positive(tau, "tau");
  require_positive(omega_over_T_b, "Omega/T_b");
  if (!(g >= 0.0) || !std::isfinite(g)) {
    fail(ErrorKind::InvalidArgument, "g must be finite and >= 0");
  }
  if (!(kappa >= 0.0) || !(gamma >= 0.0) || !std::isfinite(kappa) ||
      !std::isfinite(gamma)) {
    fail(ErrorKind::InvalidArgument, "kappa and gamma must be finite and >= 0");
  }
  if (n_max < 10) fail(ErrorKind::InvalidArgument, "Fock cutoff n_max must be >= 10");
  if (!(N_ex >= 1.0)) fail(ErrorKind::InvalidArgument, "N_ex must be >= 1");
  injection_schedule(N_ex, effective_schedule_kappa(), tau);
}

InjectionSchedule injection_schedule(double N_ex, double kappa, double tau) {
  if (!(N_ex >= 1.0)) fail(ErrorKind::InvalidArgument, "N_ex must be >= 1");
  require_positive(kappa, "kappa");
  require_positive(tau, "tau");
  const double rate = N_ex * kappa;
  const double tau0 = 1.0 / rate - tau;
  if (!(tau0 > 0.0)) {
    fail(ErrorKind::InfeasibleSchedule,
         "injection period 1/r=" + show(1.0 / rate) +
             " s is not longer than the interaction time tau=" +
             show(tau) + " s");
  }
  return {rate, tau0};
}

ThermalField field_temperature(const DensityMatrix& cavity, double Omega) {
  require_positive(Omega, "Omega");
  const int n_max = static_cast<int>(cavity.dim()) - 1;
  if (n_max < 1 || cavity.dims().count() != 1) {
    fail(ErrorKind::DimensionMismatch, "field temperature needs a single Fock factor");
  }
  const double mean = cavity.expectation(number_operator(n_max)).real();
  if (mean <= 0.0) return {0.0, 0.0};
  return {mean, Omega / std::log1p(1.0 / mean)};
}

HilbertDims composite_dims(int n_max) { return HilbertDims{n_max + 1, 2}; }

StagePropagators stage_propagators(const MicromaserParams& p,
                                   const CentralSpinState& fuel) {
  p.validate();
  if (std::abs(fuel.omega - p.omega_over_T_b) > 1e-9 * p.omega_over_T_b) {
    fail(ErrorKind::InvalidArgument,
         "atom and cavity must be resonant: fuel omega/T_b=" +
             show(fuel.omega) + ", Omega/T_b=" +
             show(p.omega_over_T_b));
  }
  if (!(fuel.p_e >= 0.0)) fail(ErrorKind::InvalidArgument, "p_e must be >= 0");
  if (fuel.p_e >= 0.5) {
    fail(ErrorKind::PopulationInversion,
         "pump with p_e >= 1/2 has no thermal operating point");
  }

  // The stationary field is never hotter than the hotter of pump and bath.
  const double pump_ratio = fuel.p_e / fuel.p_g();
  const double bath_ratio = std::exp(-p.omega_over_T_b);
  const double tail = geometric_tail(std::max(pump_ratio, bath_ratio), p.n_max);
  if (tail > kTailBound) {
    fail(ErrorKind::CutoffTooSmall,
         "n_max=" + std::to_string(p.n_max) + " leaves tail population " +
             show(tail));
  }

  const InjectionSchedule schedule =
      injection_schedule(p.N_ex, p.effective_schedule_kappa(), p.tau);

  const HilbertDims dims = composite_dims(p.n_max);
  const SpinOperators s = pauli();
  const Operator a = embed(annihilation(p.n_max), 0, dims);
  const Operator lower = embed(s.minus, 1, dims);
  const Operator raise = embed(s.plus, 1, dims);
  const Operator exchange = p.g * (raise * a + lower * a.adjoint());
  const LindbladGenerator stage1(exchange, {{lower, p.gamma}, {a, p.kappa}});

  std::vector<int> charges(static_cast<size_t>(dims.total()));
  for (int n = 0; n <= p.n_max; ++n) {
    charges[2 * n] = n + 1;  // |n, e>
    charges[2 * n + 1] = n;  // |n, g>
  }
  const Sector exchange_sector = Sector::charge(dims, charges, 0);

  const Operator field_a = annihilation(p.n_max);
  const LindbladGenerator stage2(p.Omega * number_operator(p.n_max),
                                 {{field_a, p.kappa}});
  std::vector<int> photons(static_cast<size_t>(p.n_max + 1));
  for (int n = 0; n <= p.n_max; ++n) photons[n] = n;
  const Sector diagonal = Sector::charge(field_a.dims(), photons, 0);

  return {dims, schedule, Propagator(stage1, p.tau, exchange_sector),
          Propagator(stage2, schedule.tau0, diagonal)};
}

void check_cavity(const DensityMatrix& cavity) {
  const Eigen::Index top = cavity.dim() - 1;
  const double tail = cavity.matrix()(top, top).real();
  if (tail >= kTailBound) {
    fail(ErrorKind::CutoffTooSmall,
         "Fock tail population " + show(tail) + " at the cutoff");
  }
}

Micromaser::Micromaser(MicromaserParams params, CentralSpinState fuel)
    : params_(std::move(params)),
      fuel_(fuel),
      stages_(stage_propagators(params_, fuel_)),
      cavity_sector_(stages_.empty.map().sector()),
      cycle_map_(build_cycle_map()) {}

DensityMatrix Micromaser::initial_cavity() const {
  const double mean = 1.0 / std::expm1(params_.omega_over_T_b);
  return thermal_fock_state(params_.n_max, mean);
}

namespace {

Matrix cycle_once(const StagePropagators& st, const Matrix& atom,
                  const Matrix& cavity) {
  const Matrix joint = st.interaction.apply(kron2(cavity, atom));
  const int keep[] = {0};
  const Matrix field = partial_trace(joint, st.composite, keep);
  return st.empty.apply(field);
}

}  // namespace

CycleState Micromaser::step(const CycleState& state) const {
  if (!(state.cavity.dims() == cavity_sector_.dims())) {
    fail(ErrorKind::DimensionMismatch, "cavity state does not match n_max");
  }
  const Matrix next = cycle_once(stages_, atom_state(fuel_), state.cavity.matrix());
  return {DensityMatrix::from_numerical(state.cavity.dims(), next),
          state.cycle + 1,
          state.elapsed + params_.tau + stages_.schedule.tau0};
}

Superoperator Micromaser::build_cycle_map() const {
  const Matrix atom = atom_state(fuel_);
  const Eigen::Index d = params_.n_max + 1;
  Matrix map(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    Matrix fock = Matrix::Zero(d, d);
    fock(n, n) = 1.0;
    map.col(n) = cavity_sector_.gather(cycle_once(stages_, atom, fock));
  }
  return {cavity_sector_, std::move(map)};
}

DensityMatrix Micromaser::steady_cavity() const {
  return map_fixed_point(cycle_map_);
}

double Micromaser::steady_temperature() const {
  const DensityMatrix rho = steady_cavity();
  check_cavity(rho);
  return field_temperature(rho, params_.omega_over_T_b).temperature;
}

TemperatureTrace Micromaser::run(const Convergence& convergence) const {
  if (convergence.window < 1 || convergence.max_cycles < 1 ||
      !(convergence.relative_tolerance > 0.0)) {
    fail(ErrorKind::InvalidArgument, "invalid convergence settings");
  }
  TemperatureTrace trace;
  CycleState state{initial_cavity(), 0, 0.0};
  auto record = [&](const CycleState& s) {
    const ThermalField f = field_temperature(s.cavity, params_.omega_over_T_b);
    trace.samples.push_back({params_.Omega * s.elapsed, f.mean_photons, f.temperature});
    return f.temperature;
  };
  double previous = record(state);
  long streak = 0;
  while (state.cycle < convergence.max_cycles) {
    state = step(state);
    check_cavity(state.cavity);
    const double current = record(state);
    const double scale = std::max(std::abs(current), 1e-300);
    streak = std::abs(current - previous) / scale < convergence.relative_tolerance
                 ? streak + 1
                 : 0;
    previous = current;
    if (streak >= convergence.window) {
      trace.converged = true;
      break;
    }
  }
  trace.cycles = state.cycle;
  trace.steady_temperature = previous;
  return trace;
}

TemperatureTrace run_cycles(const MicromaserParams& p,
                            const CentralSpinState& fuel,
                            const Convergence& convergence) {
  return Micromaser(p, fuel).run(convergence);
}

// ----------------------------------------------------------------- sweep

namespace {

SweepRow evaluate(const SweepPoint& point) {
  SweepRow row;
  row.point = point;
  try {
    FuelModel model;
    if (point.scheme == Scheme::Collective) {
      model = CollectiveModelParams{point.omega, point.J, point.lambda, point.S};
    } else {
      const double n = 2.0 * point.S;
      if (std::abs(n - std::round(n)) > 1e-12) {
        fail(ErrorKind::InvalidArgument, "star scheme needs N = 2S integral");
      }
      StarModelParams star;
      star.omega = point.omega;
      star.J = point.J;
      star.lambda = point.lambda;
      star.N = static_cast<int>(std::lround(n));
      model = star;
    }
    const CentralSpinState fuel = central_spin_state(model, 1.0);
    row.T_q = effective_temperature(fuel).value;
    if (point.micromaser) {
      MicromaserParams mp = *point.micromaser;
      mp.omega_over_T_b = point.omega;
      row.T_f = Micromaser(mp, fuel).steady_temperature();
    } else {
      row.T_f = coarse_grained_steady_field({1.0, fuel.p_e}, point.omega).temperature;
    }
    row.eta = carnot_efficiency(row.T_f, 1.0);
  } catch (const Error& e) {
    row.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> steady_sweep(const std::vector<SweepPoint>& grid,
                                   unsigned threads) {
  std::vector<SweepRow> rows(grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < grid.size(); k = next++) rows[k] = evaluate(grid[k]);
  };
  if (threads <= 1) {
    worker();
    return rows;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return rows;
}

}  // namespace pce
