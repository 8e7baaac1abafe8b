#pragma once

// Time-independent Lindblad generators, their cached finite-time maps, and
// stationary states.
//
// Vectorization is column-stacking restricted to a Sector: a list of matrix
// elements (row, col) that the generator maps into itself. The full sector
// (all d^2 elements, index row + col * d) recovers the usual dense
// superoperator; symmetry sectors make large composites tractable.

#include <span>
#include <utility>
#include <vector>

#include "pce/operators.hpp"

namespace pce {

struct Dissipator {
  Operator collapse;
  double rate = 0.0;
};

class Sector {
 public:
  using Element = std::pair<Eigen::Index, Eigen::Index>;

  static Sector full(const HilbertDims& dims);
  /// Elements |i><j| with charges[i] - charges[j] == order.
  static Sector charge(const HilbertDims& dims, std::span<const int> charges,
                       int order = 0);

  const HilbertDims& dims() const { return dims_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(elements_.size()); }
  std::span<const Element> elements() const { return elements_; }
  bool is_full() const { return size() == dims_.total() * dims_.total(); }

  /// Largest |m_ij| over elements outside the sector.
  double leakage(const Matrix& m) const;
  /// Throws InvalidArgument if `m` has weight outside the sector.
  Vector gather(const Matrix& m) const;
  Matrix scatter(const Vector& v) const;

  bool operator==(const Sector& other) const {
    return dims_ == other.dims_ && elements_ == other.elements_;
  }

 private:
  Sector(HilbertDims dims, std::vector<Element> elements);

  HilbertDims dims_;
  std::vector<Element> elements_;
  std::vector<Eigen::Index> slot_;  // flat (row + col*d) -> position or -1
};

/// A linear map on the matrices supported in `sector`.
class Superoperator {
 public:
  Superoperator(Sector sector, Matrix matrix);

  const Sector& sector() const { return sector_; }
  const Matrix& matrix() const { return matrix_; }

  Matrix apply(const Matrix& m) const;
  DensityMatrix apply(const DensityMatrix& rho) const;
  /// this followed by `next`
  Superoperator then(const Superoperator& next) const;

 private:
  Sector sector_;
  Matrix matrix_;
};

class LindbladGenerator {
 public:
  /// L rho = -i[H, rho] + sum_k rate_k (x_k rho x_k^+ - {x_k^+ x_k, rho} / 2)
  LindbladGenerator(Operator hamiltonian, std::vector<Dissipator> dissipators);

  const HilbertDims& dims() const { return hamiltonian_.dims(); }
  const Operator& hamiltonian() const { return hamiltonian_; }
  std::span<const Dissipator> dissipators() const { return dissipators_; }

  Matrix apply(const Matrix& rho) const;

  Superoperator superoperator() const;
  /// Throws NonInvariantSector if the generator leaks out of `sector`.
  Superoperator superoperator(const Sector& sector) const;

 private:
  Operator hamiltonian_;
  std::vector<Dissipator> dissipators_;
  Matrix effective_;  // -iH - (1/2) sum rate x^+ x
};

/// exp(L t), computed once by Pade scaling-and-squaring and cached.
class Propagator {
 public:
  Propagator(const LindbladGenerator& generator, double duration);
  Propagator(const LindbladGenerator& generator, double duration,
             const Sector& sector);
  Propagator(const Superoperator& generator, double duration);

  double duration() const { return duration_; }
  const Superoperator& map() const { return map_; }

  Matrix apply(const Matrix& m) const { return map_.apply(m); }
  DensityMatrix apply(const DensityMatrix& rho) const { return map_.apply(rho); }

 private:
  double duration_;
  Superoperator map_;
};

DensityMatrix steady_state(const LindbladGenerator& generator);
DensityMatrix steady_state(const LindbladGenerator& generator,
                           const Sector& sector);
/// Unique null vector of a generator superoperator, as a normalized state.
DensityMatrix steady_state(const Superoperator& generator);

/// Fixed point of a trace-preserving map from the null space of (M - 1).
DensityMatrix map_fixed_point(const Superoperator& map);

struct FixedPointResult {
  DensityMatrix state;
  long iterations;
  bool converged;
};

/// Repeated application until successive iterates are within `tolerance`
/// in trace distance.
FixedPointResult power_iterate(const Superoperator& map,
                               const DensityMatrix& start,
                               double tolerance = 1e-10,
                               long max_iterations = 1'000'000);

/// Gain a^+ at alpha p_e, loss a at alpha (1 - p_e); the free field
/// Hamiltonian is dropped (rotating frame).
struct CoarseGrainedParams {
  double alpha = 1.0;
  double p_e = 0.0;

  void validate() const;
};

LindbladGenerator coarse_grained_generator(const CoarseGrainedParams& p,
                                           int n_max);

struct ThermalField {
  double mean_photons;
  double temperature;
};

/// Closed-form stationary field below threshold; throws AboveThreshold for
/// p_e >= 1/2.
ThermalField coarse_grained_steady_field(const CoarseGrainedParams& p,
                                         double omega);

}  // namespace pce
