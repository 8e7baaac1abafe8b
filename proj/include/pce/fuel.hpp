#pragma once

// Spin fuel: the tape spin thermalized together with either N outer spins
// (star scheme) or a single spin-S (collective scheme). All energies and
// temperatures are in units of the bath temperature T_b.

#include <variant>

#include "pce/operators.hpp"

namespace pce {

inline constexpr int kDefaultMaxOuterSpins = 12;

struct StarModelParams {
  double omega = 6.0;
  double J = 0.8;
  double lambda = 0.75;
  int N = 1;
  int max_outer_spins = kDefaultMaxOuterSpins;

  void validate() const;
};

struct CollectiveModelParams {
  double omega = 6.0;
  double J = 0.8;
  double lambda = 0.75;
  double S = 0.5;

  void validate() const;
};

using FuelModel = std::variant<StarModelParams, CollectiveModelParams>;

/// Diagonal reduced state of the tape spin.
struct CentralSpinState {
  double p_e = 0.0;
  double omega = 0.0;

  double p_g() const { return 1.0 - p_e; }
  /// Fuel with a prescribed effective temperature (Boltzmann populations).
  static CentralSpinState thermal(double omega, double temperature);
};

struct EffectiveTemperature {
  double value = 0.0;
  bool is_zero() const { return value == 0.0; }
};

struct GibbsState {
  DensityMatrix rho;
  double ground_energy;
  /// Z exp(E0 / T): the partition function of the ground-shifted spectrum.
  double shifted_partition;
  double temperature;

  double log_partition() const;
};

/// Tape spin is factor 0 (sigma_z = diag(1, -1), |e> first), outer spins follow.
Operator build_star_hamiltonian(const StarModelParams& p);
/// Factors {2, 2S+1}: tape spin then the spin-S.
Operator build_collective_hamiltonian(const CollectiveModelParams& p);

GibbsState gibbs_state(const Operator& hamiltonian, double temperature);

/// Builds H, forms the Gibbs state at `bath_temperature`, traces to factor 0.
CentralSpinState central_spin_state(const FuelModel& model,
                                    double bath_temperature = 1.0);

/// T_q = -omega / ln(p_e / p_g). p_e == 0 yields the zero sentinel;
/// p_e >= 1/2 throws PopulationInversion.
EffectiveTemperature effective_temperature(const CentralSpinState& c);

/// eta = 1 - T_b / T_q; throws NegativeEfficiency when T_q < T_b.
double carnot_efficiency(double hot_temperature, double bath_temperature);

}  // namespace pce
