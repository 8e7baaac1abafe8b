#include "pce/lindblad.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "pce/errors.hpp"

namespace pce {

namespace {

constexpr double kSectorLeakTol = 1e-12;
constexpr double kInvarianceTol = 1e-12;
// Singular values below this fraction of the largest count as null.
constexpr double kNullRelTol = 1e-9;

DensityMatrix state_from_vector(const Sector& sector, const Vector& v) {
  Matrix m = sector.scatter(v);
  const Complex tr = m.trace();
  if (std::abs(tr) < 1e-300) {
    fail(ErrorKind::InvalidState, "null vector has zero trace");
  }
  m /= tr;
  return DensityMatrix::from_numerical(sector.dims(), m);
}

Vector unique_null_vector(const Matrix& m, const char* what) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index n = sv.size();
  const double scale = std::max(sv(0), 1e-300);
  Eigen::Index null_count = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (sv(k) <= kNullRelTol * scale) ++null_count;
  }
  if (null_count != 1) {
    fail(ErrorKind::NonUniqueSteadyState,
         std::string(what) + ": null space has dimension " +
             std::to_string(null_count));
  }
  return svd.matrixV().col(n - 1);
}

}  // namespace

// ---------------------------------------------------------------- Sector

Sector::Sector(HilbertDims dims, std::vector<Element> elements)
    : dims_(std::move(dims)), elements_(std::move(elements)) {
  const Eigen::Index d = dims_.total();
  slot_.assign(static_cast<size_t>(d * d), -1);
  for (size_t k = 0; k < elements_.size(); ++k) {
    const auto [i, j] = elements_[k];
    slot_[static_cast<size_t>(i + j * d)] = static_cast<Eigen::Index>(k);
  }
}

Sector Sector::full(const HilbertDims& dims) {
  const Eigen::Index d = dims.total();
  std::vector<Element> e;
  e.reserve(static_cast<size_t>(d * d));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) e.emplace_back(i, j);
  return Sector(dims, std::move(e));
}

Sector Sector::charge(const HilbertDims& dims, std::span<const int> charges,
                      int order) {
  const Eigen::Index d = dims.total();
  if (static_cast<Eigen::Index>(charges.size()) != d) {
    fail(ErrorKind::DimensionMismatch, "one charge per basis state required");
  }
  std::vector<Element> e;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (charges[i] - charges[j] == order) e.emplace_back(i, j);
  if (e.empty()) fail(ErrorKind::InvalidArgument, "empty charge sector");
  return Sector(dims, std::move(e));
}

double Sector::leakage(const Matrix& m) const {
  const Eigen::Index d = dims_.total();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (slot_[static_cast<size_t>(i + j * d)] < 0)
        worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

Vector Sector::gather(const Matrix& m) const {
  if (m.rows() != dims_.total() || m.cols() != dims_.total()) {
    fail(ErrorKind::DimensionMismatch, "matrix does not match sector dims");
  }
  if (!is_full()) {
    const double leak = leakage(m);
    if (leak > kSectorLeakTol * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      fail(ErrorKind::InvalidArgument,
           "matrix has weight " + show(leak) + " outside the sector");
    }
  }
  Vector v(size());
  for (Eigen::Index k = 0; k < size(); ++k) {
    v(k) = m(elements_[k].first, elements_[k].second);
  }
  return v;
}

Matrix Sector::scatter(const Vector& v) const {
  if (v.size() != size()) {
    fail(ErrorKind::DimensionMismatch, "vector does not match sector size");
  }
  Matrix m = Matrix::Zero(dims_.total(), dims_.total());
  for (Eigen::Index k = 0; k < size(); ++k) {
    m(elements_[k].first, elements_[k].second) = v(k);
  }
  return m;
}

// --------------------------------------------------------- Superoperator

Superoperator::Superoperator(Sector sector, Matrix matrix)
    : sector_(std::move(sector)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != sector_.size() || matrix_.cols() != sector_.size()) {
    fail(ErrorKind::DimensionMismatch, "superoperator does not match its sector");
  }
}

Matrix Superoperator::apply(const Matrix& m) const {
  return sector_.scatter(matrix_ * sector_.gather(m));
}

DensityMatrix Superoperator::apply(const DensityMatrix& rho) const {
  if (!(rho.dims() == sector_.dims())) {
    fail(ErrorKind::DimensionMismatch, "state does not match superoperator dims");
  }
  return DensityMatrix::from_numerical(rho.dims(), apply(rho.matrix()));
}

Superoperator Superoperator::then(const Superoperator& next) const {
  if (!(next.sector_ == sector_)) {
    fail(ErrorKind::DimensionMismatch, "composed maps act on different sectors");
  }
  return {sector_, next.matrix_ * matrix_};
}

// ----------------------------------------------------- LindbladGenerator

LindbladGenerator::LindbladGenerator(Operator hamiltonian,
                                     std::vector<Dissipator> dissipators)
    : hamiltonian_(std::move(hamiltonian)), dissipators_(std::move(dissipators)) {
  const double defect = hamiltonian_.hermiticity_defect();
  if (defect > kHermitianTol) {
    fail(ErrorKind::NonHermitian,
         "generator Hamiltonian not Hermitian (defect " + show(defect) + ")");
  }
  const Complex i{0.0, 1.0};
  effective_ = -i * hamiltonian_.matrix();
  for (const Dissipator& k : dissipators_) {
    if (!(k.collapse.dims() == hamiltonian_.dims())) {
      fail(ErrorKind::DimensionMismatch, "collapse operator dims differ from H");
    }
    if (!(k.rate >= 0.0) || !std::isfinite(k.rate)) {
      fail(ErrorKind::InvalidArgument, "dissipator rate must be finite and >= 0");
    }
    const Matrix& x = k.collapse.matrix();
    effective_ -= 0.5 * k.rate * (x.adjoint() * x);
  }
}

Matrix LindbladGenerator::apply(const Matrix& rho) const {
  Matrix out = effective_ * rho + rho * effective_.adjoint();
  for (const Dissipator& k : dissipators_) {
    if (k.rate == 0.0) continue;
    const Matrix& x = k.collapse.matrix();
    out += k.rate * (x * rho * x.adjoint());
  }
  return out;
}

Superoperator LindbladGenerator::superoperator() const {
  return superoperator(Sector::full(dims()));
}

Superoperator LindbladGenerator::superoperator(const Sector& sector) const {
  if (!(sector.dims() == dims())) {
    fail(ErrorKind::DimensionMismatch, "sector dims differ from generator dims");
  }
  const Matrix& g = effective_;
  const Eigen::Index d = dims().total();
  const Eigen::Index n = sector.size();
  const auto elements = sector.elements();
  Matrix s = Matrix::Zero(n, n);
  Matrix image(d, d);

  // L(|i><j|) = G|i><j| + |i><j|G^+ + sum_k r_k x_k|i><j|x_k^+
  for (Eigen::Index col = 0; col < n; ++col) {
    const auto [i, j] = elements[col];
    image.setZero();
    image.col(j) += g.col(i);
    image.row(i) += g.col(j).adjoint();
    for (const Dissipator& k : dissipators_) {
      if (k.rate == 0.0) continue;
      const Matrix& x = k.collapse.matrix();
      image += k.rate * (x.col(i) * x.col(j).adjoint());
    }
    if (!sector.is_full()) {
      const double leak = sector.leakage(image);
      if (leak > kInvarianceTol * std::max(1.0, g.cwiseAbs().maxCoeff())) {
        fail(ErrorKind::NonInvariantSector,
             "generator leaks " + show(leak) + " out of the sector");
      }
    }
    for (Eigen::Index row = 0; row < n; ++row) {
      s(row, col) = image(elements[row].first, elements[row].second);
    }
  }
  return {sector, std::move(s)};
}

// ------------------------------------------------------------ Propagator

namespace {

Matrix exponentiate(const Matrix& generator, double duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    fail(ErrorKind::InvalidArgument, "propagation time must be finite and >= 0");
  }
  if (duration == 0.0) {
    return Matrix::Identity(generator.rows(), generator.cols());
  }
  Matrix scaled = generator * duration;
  return scaled.exp();
}

}  // namespace

Propagator::Propagator(const LindbladGenerator& generator, double duration)
    : Propagator(generator.superoperator(), duration) {}

Propagator::Propagator(const LindbladGenerator& generator, double duration,
                       const Sector& sector)
    : Propagator(generator.superoperator(sector), duration) {}

Propagator::Propagator(const Superoperator& generator, double duration)
    : duration_(duration),
      map_(generator.sector(), exponentiate(generator.matrix(), duration)) {}

// --------------------------------------------------------- steady states

DensityMatrix steady_state(const LindbladGenerator& generator) {
  return steady_state(generator.superoperator());
}

DensityMatrix steady_state(const LindbladGenerator& generator,
                           const Sector& sector) {
  return steady_state(generator.superoperator(sector));
}

DensityMatrix steady_state(const Superoperator& generator) {
  const Vector v = unique_null_vector(generator.matrix(), "steady state");
  return state_from_vector(generator.sector(), v);
}

DensityMatrix map_fixed_point(const Superoperator& map) {
  const Matrix shifted =
      map.matrix() - Matrix::Identity(map.matrix().rows(), map.matrix().cols());
  const Vector v = unique_null_vector(shifted, "map fixed point");
  return state_from_vector(map.sector(), v);
}

FixedPointResult power_iterate(const Superoperator& map,
                               const DensityMatrix& start, double tolerance,
                               long max_iterations) {
  const Sector& sector = map.sector();
  Vector v = sector.gather(start.matrix());
  for (long it = 1; it <= max_iterations; ++it) {
    Vector next = map.matrix() * v;
    const Matrix diff = sector.scatter(next - v);
    v = std::move(next);
    if (trace_distance(diff, Matrix::Zero(diff.rows(), diff.cols())) < tolerance) {
      return {state_from_vector(sector, v), it, true};
    }
  }
  return {state_from_vector(sector, v), max_iterations, false};
}

// ------------------------------------------------------- coarse grained

void CoarseGrainedParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    fail(ErrorKind::InvalidArgument, "alpha must be positive");
  }
  if (!(p_e >= 0.0) || p_e > 1.0) {
    fail(ErrorKind::InvalidArgument, "p_e must lie in [0, 1]");
  }
}

LindbladGenerator coarse_grained_generator(const CoarseGrainedParams& p,
                                           int n_max) {
  p.validate();
  const Operator a = annihilation(n_max);
  const Operator zero(a.dims(), Matrix::Zero(a.dim(), a.dim()));
  return LindbladGenerator(zero, {{a.adjoint(), p.alpha * p.p_e},
                                  {a, p.alpha * (1.0 - p.p_e)}});
}

ThermalField coarse_grained_steady_field(const CoarseGrainedParams& p,
                                         double omega) {
  p.validate();
  if (!(omega > 0.0)) fail(ErrorKind::InvalidArgument, "omega must be positive");
  if (p.p_e >= 0.5) {
    fail(ErrorKind::AboveThreshold,
         "p_e=" + show(p.p_e) +
             " is at or above maser threshold; no thermal steady state");
  }
  if (p.p_e == 0.0) return {0.0, 0.0};
  const double mean = p.p_e / (1.0 - 2.0 * p.p_e);
  return {mean, -omega / std::log(p.p_e / (1.0 - p.p_e))};
}

}  // namespace pce
