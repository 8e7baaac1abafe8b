#pragma once

// Dense operator algebra on composite Hilbert spaces.
//
// Kronecker convention: the leftmost factor is the slowest-varying index, so
// for dims {d0, d1, d2} the basis state |i0 i1 i2> has flat index
// (i0 * d1 + i1) * d2 + i2. Every routine in this header follows it.

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pce {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityFloor = -1e-9;

class HilbertDims {
 public:
  HilbertDims() = default;
  explicit HilbertDims(std::vector<int> factors);
  HilbertDims(std::initializer_list<int> factors)
      : HilbertDims(std::vector<int>(factors)) {}

  std::span<const int> factors() const { return factors_; }
  int count() const { return static_cast<int>(factors_.size()); }
  int operator[](int position) const;
  Eigen::Index total() const { return total_; }

  /// Dimensions of the factors listed in `keep`, in ascending index order.
  HilbertDims subset(std::span<const int> keep) const;

  bool operator==(const HilbertDims&) const = default;

 private:
  std::vector<int> factors_;
  Eigen::Index total_ = 0;
};

class Operator {
 public:
  Operator(HilbertDims dims, Matrix matrix);
  /// Single-factor operator; dims are {rows}.
  explicit Operator(Matrix matrix);

  const HilbertDims& dims() const { return dims_; }
  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  Operator adjoint() const { return {dims_, matrix_.adjoint()}; }
  double hermiticity_defect() const;
  bool is_hermitian(double tol = kHermitianTol) const {
    return hermiticity_defect() <= tol;
  }

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex c, const Operator& a);
  friend Operator operator*(double c, const Operator& a) {
    return Complex(c, 0.0) * a;
  }

 private:
  HilbertDims dims_;
  Matrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);
Operator identity(const HilbertDims& dims);
Operator kron(const Operator& a, const Operator& b);

/// A validated quantum state: Hermitian, unit trace, eigenvalues above the
/// positivity floor. Construction throws InvalidState otherwise.
class DensityMatrix {
 public:
  DensityMatrix(HilbertDims dims, Matrix matrix);

  /// Hermitizes and renormalizes before validating. For states produced by
  /// long chains of numerical maps whose drift is already known to be small.
  static DensityMatrix from_numerical(HilbertDims dims, const Matrix& matrix);

  /// sum_k weights_k |v_k><v_k| for orthonormal columns v_k. Positivity
  /// follows from the non-negative weights, so no eigensolve is needed.
  static DensityMatrix from_eigensystem(HilbertDims dims, const Matrix& vectors,
                                        const Eigen::VectorXd& weights);
  static DensityMatrix from_eigensystem(HilbertDims dims,
                                        const Eigen::MatrixXd& vectors,
                                        const Eigen::VectorXd& weights);

  const HilbertDims& dims() const { return dims_; }
  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  Complex expectation(const Operator& op) const;
  double min_eigenvalue() const;
  double purity() const;

 private:
  struct Trusted {};
  DensityMatrix(HilbertDims dims, Matrix matrix, Trusted);

  HilbertDims dims_;
  Matrix matrix_;
};

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Matrix& a, const Matrix& b);

struct SpinOperators {
  Operator x, y, z, plus, minus;
};

/// Angular-momentum matrices for spin magnitude `s` in the basis
/// m = s, s-1, ..., -s. Throws InvalidSpin unless 2s is a positive integer.
SpinOperators spin_operators(double s);

/// Pauli matrices (twice the spin-1/2 operators); plus/minus are the
/// ladder operators |up><down| and |down><up|, not sigma_x +- i sigma_y.
SpinOperators pauli();

/// Places `op` at `position` of `dims`, identity elsewhere.
Operator embed(const Operator& op, int position, const HilbertDims& dims);

/// S_a = (1/2) sum_i sigma_ia on N qubits.
SpinOperators collective_spin(int n_spins);

Matrix partial_trace(const Matrix& m, const HilbertDims& dims,
                     std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& state,
                            std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& state,
                            std::initializer_list<int> keep);

// Bosonic mode truncated at n_max photons (dimension n_max + 1).
Operator annihilation(int n_max);
Operator creation(int n_max);
Operator number_operator(int n_max);

/// Geometric Fock distribution with mean photon number `mean_photons`,
/// truncated at n_max and renormalized.
DensityMatrix thermal_fock_state(int n_max, double mean_photons);

/// Diagonal Fock state populations -> density matrix.
DensityMatrix fock_populations_state(std::span<const double> populations);

}  // namespace pce
