#include "pce/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pce/errors.hpp"

namespace pce {

namespace {

const Complex kI{0.0, 1.0};

void require_same_dims(const HilbertDims& a, const HilbertDims& b,
                       const char* what) {
  if (!(a == b)) fail(ErrorKind::DimensionMismatch, what);
}

// flat index -> per-factor digits, leftmost factor slowest
std::vector<int> digits_of(Eigen::Index flat, std::span<const int> factors) {
  std::vector<int> digits(factors.size());
  for (int k = static_cast<int>(factors.size()) - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(flat % factors[k]);
    flat /= factors[k];
  }
  return digits;
}

}  // namespace

HilbertDims::HilbertDims(std::vector<int> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) {
    fail(ErrorKind::InvalidArgument, "HilbertDims needs at least one factor");
  }
  total_ = 1;
  for (int f : factors_) {
    if (f < 2) fail(ErrorKind::InvalidArgument, "factor dimension must be >= 2");
    total_ *= f;
  }
}

int HilbertDims::operator[](int position) const {
  if (position < 0 || position >= count()) {
    fail(ErrorKind::IndexOutOfRange,
         "factor position " + std::to_string(position) + " out of range");
  }
  return factors_[position];
}

HilbertDims HilbertDims::subset(std::span<const int> keep) const {
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> out;
  for (int k : sorted) out.push_back((*this)[k]);
  return HilbertDims(std::move(out));
}

Operator::Operator(HilbertDims dims, Matrix matrix)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != dims_.total()) {
    fail(ErrorKind::DimensionMismatch,
         "operator matrix is " + std::to_string(matrix_.rows()) + "x" +
             std::to_string(matrix_.cols()) + ", dims total " +
             std::to_string(dims_.total()));
  }
}

Operator::Operator(Matrix matrix) : matrix_(std::move(matrix)) {
  dims_ = HilbertDims{static_cast<int>(matrix_.rows())};
  if (matrix_.rows() != matrix_.cols()) {
    fail(ErrorKind::DimensionMismatch, "operator matrix must be square");
  }
}

double Operator::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Operator operator+(const Operator& a, const Operator& b) {
  require_same_dims(a.dims_, b.dims_, "operator sum");
  return {a.dims_, a.matrix_ + b.matrix_};
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_dims(a.dims_, b.dims_, "operator difference");
  return {a.dims_, a.matrix_ - b.matrix_};
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dims(a.dims_, b.dims_, "operator product");
  return {a.dims_, a.matrix_ * b.matrix_};
}

Operator operator*(Complex c, const Operator& a) {
  return {a.dims_, c * a.matrix_};
}

Operator commutator(const Operator& a, const Operator& b) {
  return a * b - b * a;
}

Operator identity(const HilbertDims& dims) {
  return {dims, Matrix::Identity(dims.total(), dims.total())};
}

namespace {

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HilbertDims concat(const HilbertDims& a, const HilbertDims& b) {
  std::vector<int> f(a.factors().begin(), a.factors().end());
  f.insert(f.end(), b.factors().begin(), b.factors().end());
  return HilbertDims(std::move(f));
}

}  // namespace

Operator kron(const Operator& a, const Operator& b) {
  return {concat(a.dims(), b.dims()), kron_matrix(a.matrix(), b.matrix())};
}

DensityMatrix::DensityMatrix(HilbertDims dims, Matrix matrix)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != dims_.total()) {
    fail(ErrorKind::DimensionMismatch, "density matrix shape does not match dims");
  }
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    fail(ErrorKind::InvalidState,
         "density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    fail(ErrorKind::InvalidState,
         "density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  const double lo = min_eigenvalue();
  if (lo < kPositivityFloor) {
    fail(ErrorKind::InvalidState,
         "density matrix has eigenvalue " + std::to_string(lo));
  }
}

DensityMatrix DensityMatrix::from_numerical(HilbertDims dims,
                                            const Matrix& matrix) {
  Matrix h = 0.5 * (matrix + matrix.adjoint());
  const Complex tr = h.trace();
  if (std::abs(tr) == 0.0) {
    fail(ErrorKind::InvalidState, "state has zero trace");
  }
  h /= tr.real();
  return DensityMatrix(std::move(dims), std::move(h));
}

DensityMatrix::DensityMatrix(HilbertDims dims, Matrix matrix, Trusted)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {}

namespace {

void check_weights(const Eigen::VectorXd& weights, Eigen::Index columns) {
  if (weights.size() != columns) {
    fail(ErrorKind::DimensionMismatch, "one weight per eigenvector required");
  }
  if (weights.minCoeff() < 0.0) fail(ErrorKind::InvalidState, "negative weight");
  if (std::abs(weights.sum() - 1.0) > kTraceTol) {
    fail(ErrorKind::InvalidState, "weights do not sum to 1");
  }
}

}  // namespace

DensityMatrix DensityMatrix::from_eigensystem(HilbertDims dims,
                                              const Matrix& vectors,
                                              const Eigen::VectorXd& weights) {
  check_weights(weights, vectors.cols());
  Matrix rho = vectors * weights.cast<Complex>().asDiagonal() * vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  if (rho.rows() != dims.total()) fail(ErrorKind::DimensionMismatch, "eigenvector length");
  return DensityMatrix(std::move(dims), std::move(rho), Trusted{});
}

DensityMatrix DensityMatrix::from_eigensystem(HilbertDims dims,
                                              const Eigen::MatrixXd& vectors,
                                              const Eigen::VectorXd& weights) {
  check_weights(weights, vectors.cols());
  Eigen::MatrixXd rho = vectors * weights.asDiagonal() * vectors.transpose();
  rho = 0.5 * (rho + rho.transpose());
  if (rho.rows() != dims.total()) fail(ErrorKind::DimensionMismatch, "eigenvector length");
  return DensityMatrix(std::move(dims), rho.cast<Complex>(), Trusted{});
}

Complex DensityMatrix::expectation(const Operator& op) const {
  require_same_dims(dims_, op.dims(), "expectation value");
  return (matrix_ * op.matrix()).trace();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const {
  return (matrix_ * matrix_).trace().real();
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  return {concat(a.dims(), b.dims()), kron_matrix(a.matrix(), b.matrix())};
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Matrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

SpinOperators spin_operators(double s) {
  const double twice = 2.0 * s;
  const long twice_int = std::lround(twice);
  if (!(twice_int >= 1) || std::abs(twice - static_cast<double>(twice_int)) > 1e-12) {
    fail(ErrorKind::InvalidSpin,
         "spin magnitude must be a positive half-integer, got " +
             std::to_string(s));
  }
  const int d = static_cast<int>(twice_int) + 1;
  Matrix sz = Matrix::Zero(d, d);
  Matrix sp = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = s - k;
    sz(k, k) = m;
    if (k > 0) {
      // <m+1| S+ |m>, row k-1 holds m+1
      sp(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
  }
  Matrix sm = sp.adjoint();
  Matrix sx = 0.5 * (sp + sm);
  Matrix sy = (sp - sm) / (2.0 * kI);
  return {Operator(sx), Operator(sy), Operator(sz), Operator(sp), Operator(sm)};
}

SpinOperators pauli() {
  SpinOperators half = spin_operators(0.5);
  return {2.0 * half.x, 2.0 * half.y, 2.0 * half.z, half.plus, half.minus};
}

Operator embed(const Operator& op, int position, const HilbertDims& dims) {
  const int target = dims[position];
  if (op.dim() != target) {
    fail(ErrorKind::DimensionMismatch,
         "operator of dimension " + std::to_string(op.dim()) +
             " embedded at factor of dimension " + std::to_string(target));
  }
  Eigen::Index left = 1;
  for (int k = 0; k < position; ++k) left *= dims[k];
  const Eigen::Index right = dims.total() / (left * target);
  Matrix m = kron_matrix(Matrix::Identity(left, left),
                         kron_matrix(op.matrix(), Matrix::Identity(right, right)));
  return {dims, std::move(m)};
}

SpinOperators collective_spin(int n_spins) {
  if (n_spins < 1) {
    fail(ErrorKind::InvalidArgument, "collective spin needs at least one spin");
  }
  const HilbertDims dims(std::vector<int>(n_spins, 2));
  const SpinOperators half = spin_operators(0.5);
  Matrix zero = Matrix::Zero(dims.total(), dims.total());
  SpinOperators out{Operator(dims, zero), Operator(dims, zero),
                    Operator(dims, zero), Operator(dims, zero),
                    Operator(dims, zero)};
  for (int i = 0; i < n_spins; ++i) {
    out.x = out.x + embed(half.x, i, dims);
    out.y = out.y + embed(half.y, i, dims);
    out.z = out.z + embed(half.z, i, dims);
    out.plus = out.plus + embed(half.plus, i, dims);
    out.minus = out.minus + embed(half.minus, i, dims);
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const HilbertDims& dims,
                     std::span<const int> keep) {
  if (keep.empty()) fail(ErrorKind::InvalidArgument, "partial trace keeps nothing");
  if (m.rows() != dims.total() || m.cols() != dims.total()) {
    fail(ErrorKind::DimensionMismatch, "partial trace input shape");
  }
  std::vector<bool> kept(dims.count(), false);
  for (int k : keep) {
    if (k < 0 || k >= dims.count()) {
      fail(ErrorKind::IndexOutOfRange,
           "partial trace index " + std::to_string(k) + " out of range");
    }
    if (kept[k]) fail(ErrorKind::InvalidArgument, "duplicate partial trace index");
    kept[k] = true;
  }

  std::vector<int> kept_factors, traced_factors;
  for (int k = 0; k < dims.count(); ++k) {
    (kept[k] ? kept_factors : traced_factors).push_back(dims[k]);
  }
  const Eigen::Index dk = std::accumulate(kept_factors.begin(), kept_factors.end(),
                                          Eigen::Index{1}, std::multiplies<>());
  const Eigen::Index dt = dims.total() / dk;

  // full[a * dt + b] = flat index of (kept digits of a, traced digits of b)
  std::vector<Eigen::Index> full(dims.total());
  for (Eigen::Index flat = 0; flat < dims.total(); ++flat) {
    const std::vector<int> digits = digits_of(flat, dims.factors());
    Eigen::Index a = 0, b = 0;
    for (int k = 0; k < dims.count(); ++k) {
      if (kept[k]) a = a * dims[k] + digits[k];
      else b = b * dims[k] + digits[k];
    }
    full[a * dt + b] = flat;
  }

  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index a1 = 0; a1 < dk; ++a1) {
    for (Eigen::Index a2 = 0; a2 < dk; ++a2) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index b = 0; b < dt; ++b) {
        acc += m(full[a1 * dt + b], full[a2 * dt + b]);
      }
      out(a1, a2) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& state,
                            std::span<const int> keep) {
  Matrix reduced = partial_trace(state.matrix(), state.dims(), keep);
  // Summation can leave ~1e-16 anti-Hermitian residue.
  return DensityMatrix::from_numerical(state.dims().subset(keep), reduced);
}

DensityMatrix partial_trace(const DensityMatrix& state,
                            std::initializer_list<int> keep) {
  return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

Operator annihilation(int n_max) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "Fock cutoff must be >= 1");
  Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(std::move(a));
}

Operator creation(int n_max) { return annihilation(n_max).adjoint(); }

Operator number_operator(int n_max) {
  Matrix n = Matrix::Zero(n_max + 1, n_max + 1);
  for (int k = 0; k <= n_max; ++k) n(k, k) = static_cast<double>(k);
  return Operator(std::move(n));
}

DensityMatrix thermal_fock_state(int n_max, double mean_photons) {
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "Fock cutoff must be >= 1");
  if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) {
    fail(ErrorKind::InvalidArgument, "mean photon number must be finite and >= 0");
  }
  std::vector<double> p(n_max + 1, 0.0);
  const double ratio = mean_photons / (1.0 + mean_photons);
  double w = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    p[n] = w;
    w *= ratio;
  }
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= z;
  return fock_populations_state(p);
}

DensityMatrix fock_populations_state(std::span<const double> populations) {
  const auto d = static_cast<Eigen::Index>(populations.size());
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) m(n, n) = populations[n];
  return DensityMatrix(HilbertDims{static_cast<int>(d)}, std::move(m));
}

}  // namespace pce
