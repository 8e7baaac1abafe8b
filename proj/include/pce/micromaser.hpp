#pragma once

// Two-stage micromaser driven by tape spins: each cycle an atom interacts
// with the cavity for tau (Jaynes-Cummings exchange, atomic decay, cavity
// loss), is discarded, and the empty cavity decays for tau0.
//
// Stage 1 runs in the resonant interaction picture; the free Hamiltonian
// commutes with the exchange term and both dissipators, so photon-number
// statistics are frame independent. Rates are angular frequencies (rad/s),
// times in seconds. Temperatures are reported in units of T_b.

#include <optional>
#include <string>
#include <vector>

#include "pce/fuel.hpp"
#include "pce/lindblad.hpp"

namespace pce {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct MicromaserParams {
  double Omega = 0.0;   ///< cavity (= atomic) angular frequency
  double g = 0.0;       ///< exchange coupling
  double kappa = 0.0;   ///< cavity loss Omega / Q
  double gamma = 0.0;   ///< atomic decay
  double tau = 0.0;     ///< interaction time per atom
  double N_ex = 1.0;    ///< atoms per photon lifetime
  /// Loss rate that fixes the injection period (1/r = 1/(N_ex kappa)).
  /// Unset means `kappa`. Loss sweeps set it to keep the schedule fixed.
  std::optional<double> schedule_kappa;
  int n_max = 30;
  double omega_over_T_b = 6.0;  ///< Omega / T_b, sets the temperature scale

  /// Lab notation: Omega/2pi and gamma/2pi in Hz, g/pi in Hz.
  static MicromaserParams from_lab_units(double omega_over_2pi_hz, double Q,
                                         double gamma_over_2pi_hz,
                                         double g_over_pi_hz, double tau_s,
                                         double N_ex, int n_max = 30,
                                         double omega_over_T_b = 6.0);
  /// Ω/2π = 50 GHz, Q = 2e10, τ = 9.5 µs, γ/2π = 33.3 Hz, g/π = 50 kHz,
  /// N_ex = 6500.
  static MicromaserParams reference();

  double effective_schedule_kappa() const {
    return schedule_kappa.value_or(kappa);
  }
  void validate() const;
};

struct InjectionSchedule {
  double rate;  ///< r, atoms per second
  double tau0;  ///< empty-cavity time between atoms
};

/// r = N_ex kappa, tau0 = 1/r - tau; throws InfeasibleSchedule if tau0 <= 0.
InjectionSchedule injection_schedule(double N_ex, double kappa, double tau);

/// Mean photon number and field temperature Omega / ln(1 + 1/n).
/// Temperature is in the units of `Omega`; an empty field returns 0.
ThermalField field_temperature(const DensityMatrix& cavity, double Omega);

/// Cavity factor first, atom second: dims {n_max + 1, 2}, atom |e> = index 0.
HilbertDims composite_dims(int n_max);

struct StagePropagators {
  HilbertDims composite;
  InjectionSchedule schedule;
  Propagator interaction;  ///< atom + field over tau, excitation sector
  Propagator empty;        ///< field alone over tau0, diagonal sector
};

/// Builds and exponentiates both stage generators. Throws CutoffTooSmall
/// if a thermal field at the fuel temperature would populate n_max above
/// 1e-8, and PopulationInversion for p_e >= 1/2.
StagePropagators stage_propagators(const MicromaserParams& p,
                                   const CentralSpinState& fuel);

struct CycleState {
  DensityMatrix cavity;
  long cycle = 0;
  double elapsed = 0.0;  ///< seconds
};

struct TemperatureSample {
  double time;          ///< Omega * elapsed (dimensionless)
  double mean_photons;
  double temperature;   ///< T_f / T_b
};

struct TemperatureTrace {
  std::vector<TemperatureSample> samples;  ///< one per cycle, cycle 0 first
  bool converged = false;
  double steady_temperature = 0.0;
  long cycles = 0;
};

struct Convergence {
  double relative_tolerance = 1e-8;
  long window = 50;
  long max_cycles = 1'000'000;
};

inline constexpr double kTailBound = 1e-8;

class Micromaser {
 public:
  Micromaser(MicromaserParams params, CentralSpinState fuel);

  const MicromaserParams& params() const { return params_; }
  const CentralSpinState& fuel() const { return fuel_; }
  const StagePropagators& stages() const { return stages_; }

  /// Thermal field at T_b.
  DensityMatrix initial_cavity() const;
  /// Tensor in a fresh atom, interact for tau, trace the atom out, decay
  /// for tau0. Cavity must be diagonal in the Fock basis.
  CycleState step(const CycleState& state) const;

  /// The per-cycle map restricted to Fock-diagonal cavity states.
  const Superoperator& cycle_map() const { return cycle_map_; }

  /// Stationary cavity state from the null space of the cycle map.
  DensityMatrix steady_cavity() const;
  double steady_temperature() const;

  TemperatureTrace run(const Convergence& convergence = {}) const;

 private:
  Superoperator build_cycle_map() const;

  MicromaserParams params_;
  CentralSpinState fuel_;
  StagePropagators stages_;
  Sector cavity_sector_;
  Superoperator cycle_map_;
};

/// Checks the cavity invariants (validated DensityMatrix plus Fock tail
/// below kTailBound); throws InvalidState or CutoffTooSmall.
void check_cavity(const DensityMatrix& cavity);

TemperatureTrace run_cycles(const MicromaserParams& p,
                            const CentralSpinState& fuel,
                            const Convergence& convergence = {});

// ------------------------------------------------------------- sweeps

enum class Scheme { Collective, Star };

struct SweepPoint {
  Scheme scheme = Scheme::Collective;
  double S = 0.5;              ///< N = 2S for the star scheme
  double lambda = 1.0;
  double omega = 6.0;          ///< fuel Bohr frequency over T_b
  double J = 0.8;
  /// Unset: coarse-grained (lossless, T_f = T_q). Set: micromaser steady state.
  std::optional<MicromaserParams> micromaser;
};

struct SweepRow {
  SweepPoint point;
  double T_q = 0.0;
  double T_f = 0.0;
  double eta = 0.0;
  std::string error;  ///< empty on success

  bool ok() const { return error.empty(); }
};

/// Rows come back in grid order; per-point failures are recorded in-row.
std::vector<SweepRow> steady_sweep(const std::vector<SweepPoint>& grid,
                                   unsigned threads = 0);

}  // namespace pce
