#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "pce/errors.hpp"
#include "pce/lindblad.hpp"

using namespace pce;

namespace {

const Complex kI{0.0, 1.0};

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

Matrix random_matrix(Eigen::Index d, std::mt19937& rng) {
  std::normal_distribution<double> n;
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

Matrix random_state(Eigen::Index d, std::mt19937& rng) {
  const Matrix a = random_matrix(d, rng);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Matrix random_hermitian(Eigen::Index d, std::mt19937& rng) {
  const Matrix a = random_matrix(d, rng);
  return 0.5 * (a + a.adjoint());
}

// Dense column-stacked generator from the Kronecker identity
// vec(A X B) = (B^T (x) A) vec(X).
Matrix kron_generator(const Matrix& h, const std::vector<std::pair<Matrix, double>>& jumps) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  auto kp = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  Matrix l = -kI * (kp(id, h) - kp(h.transpose(), id));
  for (const auto& [x, r] : jumps) {
    const Matrix xx = x.adjoint() * x;
    l += r * (kp(x.conjugate(), x) - 0.5 * kp(id, xx) - 0.5 * kp(xx.transpose(), id));
  }
  return l;
}

double mean_photons(const Matrix& rho) {
  double n = 0.0;
  for (Eigen::Index k = 0; k < rho.rows(); ++k) n += static_cast<double>(k) * rho(k, k).real();
  return n;
}

std::vector<int> photon_charges(int n_max) {
  std::vector<int> c(n_max + 1);
  for (int k = 0; k <= n_max; ++k) c[k] = k;
  return c;
}

Sector diagonal_sector(int n_max) {
  const std::vector<int> c = photon_charges(n_max);
  return Sector::charge(HilbertDims({n_max + 1}), c);
}

LindbladGenerator two_level_generator(std::mt19937& rng) {
  const Matrix h = random_hermitian(3, rng);
  const Matrix x1 = random_matrix(3, rng);
  const Matrix x2 = random_matrix(3, rng);
  return LindbladGenerator(Operator(h), {{Operator(x1), 0.7}, {Operator(x2), 0.2}});
}

}  // namespace

TEST_CASE("generator preserves trace and Hermiticity") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + trial % 4;
    const Matrix h = random_hermitian(d, rng);
    const LindbladGenerator gen(Operator(h), {{Operator(random_matrix(d, rng)), 0.3 + 0.01 * trial},
                                              {Operator(random_matrix(d, rng)), 1.1}});
    const Matrix out = gen.apply(random_state(d, rng));
    CHECK(std::abs(out.trace()) < 1e-12);
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("dense superoperator matches the Kronecker form and elementwise action") {
  std::mt19937 rng(11);
  for (Eigen::Index d : {2, 3, 5}) {
    const Matrix h = random_hermitian(d, rng);
    const Matrix x1 = random_matrix(d, rng);
    const Matrix x2 = random_matrix(d, rng);
    const LindbladGenerator gen(Operator(h), {{Operator(x1), 0.4}, {Operator(x2), 1.3}});
    const Matrix oracle = kron_generator(h, {{x1, 0.4}, {x2, 1.3}});
    CHECK((gen.superoperator().matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);

    // Written out term by term.
    const Matrix rho = random_state(d, rng);
    Matrix direct = -kI * (h * rho - rho * h);
    for (const auto& [x, r] : {std::pair{x1, 0.4}, std::pair{x2, 1.3}}) {
      const Matrix xx = x.adjoint() * x;
      direct += r * (x * rho * x.adjoint() - 0.5 * (xx * rho + rho * xx));
    }
    CHECK((gen.apply(rho) - direct).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((gen.superoperator().apply(rho) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unitary evolution conserves purity") {
  const LindbladGenerator gen(pauli().z, {});
  Matrix psi(2, 2);
  psi << 0.5, 0.5, 0.5, 0.5;
  const DensityMatrix rho(HilbertDims({2}), psi);
  for (double t : {0.1, 1.0, 3.7}) {
    const DensityMatrix out = Propagator(gen, t).apply(rho);
    CHECK(out.purity() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.matrix()(0, 1).real() == doctest::Approx(0.5 * std::cos(2.0 * t)).epsilon(1e-12));
  }
}

TEST_CASE("propagator basics") {
  std::mt19937 rng(3);
  const LindbladGenerator gen = two_level_generator(rng);
  SUBCASE("zero duration is the identity") {
    const Propagator p(gen, 0.0);
    CHECK((p.map().matrix() - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("negative duration is rejected") {
    CHECK(kind_of([&] { Propagator(gen, -1e-3); }) == ErrorKind::InvalidArgument);
  }
  SUBCASE("semigroup property") {
    const Propagator a(gen, 0.3), b(gen, 1.1), ab(gen, 1.4);
    const Matrix composed = a.map().then(b.map()).matrix();
    CHECK((composed - ab.map().matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("output remains a valid state") {
    for (double t : {0.01, 0.5, 10.0}) {
      const DensityMatrix out = Propagator(gen, t).apply(DensityMatrix(HilbertDims({3}), random_state(3, rng)));
      CHECK(out.min_eigenvalue() > -1e-10);
    }
  }
}

TEST_CASE("amplitude damping") {
  const int n_max = 25;
  const double kappa = 0.8;
  const LindbladGenerator gen(Operator(Matrix::Zero(n_max + 1, n_max + 1)),
                              {{annihilation(n_max), kappa}});
  const DensityMatrix start = thermal_fock_state(n_max, 1.0);
  const double n0 = mean_photons(start.matrix());
  for (double t : {0.25, 1.0, 4.0}) {
    const Matrix out = Propagator(gen, t).apply(start.matrix());
    CHECK(mean_photons(out) == doctest::Approx(n0 * std::exp(-kappa * t)).epsilon(1e-10));
  }
  const DensityMatrix ss = steady_state(gen);
  CHECK(std::abs(ss.matrix()(0, 0) - 1.0) < 1e-10);
}

TEST_CASE("vacuum Rabi oscillation") {
  const int n_max = 3;
  const HilbertDims dims({n_max + 1, 2});
  const double g = 1.7;
  const Operator a = embed(annihilation(n_max), 0, dims);
  const Operator sp = embed(pauli().plus, 1, dims);
  const Operator h = g * (sp * a + sp.adjoint() * a.adjoint());
  const LindbladGenerator gen(h, {});
  Matrix psi = Matrix::Zero(dims.total(), dims.total());
  psi(0, 0) = 1.0;  // |0, e>
  const DensityMatrix start(dims, psi);
  for (double t : {0.1, 0.6, 2.3}) {
    const DensityMatrix out = Propagator(gen, t).apply(start);
    const DensityMatrix atom = partial_trace(out, {1});
    CHECK(atom.matrix()(0, 0).real() == doctest::Approx(std::pow(std::cos(g * t), 2)).epsilon(1e-12));
  }
}

TEST_CASE("coarse-grained field") {
  SUBCASE("analytic thermal steady state") {
    for (double p : {0.25, 0.1383, 0.01}) {
      const CoarseGrainedParams cg{1.0, p};
      const ThermalField f = coarse_grained_steady_field(cg, 6.0);
      CHECK(f.mean_photons == doctest::Approx(p / (1.0 - 2.0 * p)));
      CHECK(f.temperature == doctest::Approx(-6.0 / std::log(p / (1.0 - p))));
      const DensityMatrix numeric = steady_state(coarse_grained_generator(cg, 40));
      CHECK(trace_distance(numeric.matrix(), thermal_fock_state(40, f.mean_photons).matrix()) < 1e-8);
    }
    CHECK(coarse_grained_steady_field({1.0, 0.25}, 6.0).mean_photons == doctest::Approx(0.5));
    CHECK(coarse_grained_steady_field({1.0, 0.1383}, 6.0).mean_photons ==
          doctest::Approx(0.1912).epsilon(1e-3));
  }
  SUBCASE("geometric ratios and independence of the rate scale") {
    const double p = 0.2;
    const DensityMatrix a = steady_state(coarse_grained_generator({1.0, p}, 30));
    const DensityMatrix b = steady_state(coarse_grained_generator({37.0, p}, 30));
    CHECK(trace_distance(a.matrix(), b.matrix()) < 1e-10);
    for (int n = 0; n < 10; ++n) {
      CHECK(a.matrix()(n + 1, n + 1).real() / a.matrix()(n, n).real() ==
            doctest::Approx(p / (1.0 - p)).epsilon(1e-8));
    }
  }
  SUBCASE("threshold and edge cases") {
    CHECK(kind_of([] { coarse_grained_steady_field({1.0, 0.5}, 6.0); }) == ErrorKind::AboveThreshold);
    const ThermalField empty = coarse_grained_steady_field({1.0, 0.0}, 6.0);
    CHECK(empty.mean_photons == 0.0);
    CHECK(empty.temperature == 0.0);
    CHECK(kind_of([] { coarse_grained_generator({-1.0, 0.1}, 10); }) == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("steady state requires a unique null vector") {
  const LindbladGenerator frozen(Operator(Matrix::Zero(3, 3)), {});
  CHECK(kind_of([&] { steady_state(frozen); }) == ErrorKind::NonUniqueSteadyState);
  const LindbladGenerator dephasing(Operator(Matrix::Zero(2, 2)), {{pauli().z, 1.0}});
  CHECK(kind_of([&] { steady_state(dephasing); }) == ErrorKind::NonUniqueSteadyState);
}

TEST_CASE("symmetry sectors") {
  const int n_max = 6;
  const LindbladGenerator gen = coarse_grained_generator({1.3, 0.2}, n_max);
  const Sector diag = diagonal_sector(n_max);
  CHECK(diag.size() == n_max + 1);
  SUBCASE("restriction equals the matching block of the dense generator") {
    const Matrix full = gen.superoperator().matrix();
    const Matrix restricted = gen.superoperator(diag).matrix();
    const Eigen::Index d = n_max + 1;
    for (Eigen::Index a = 0; a < diag.size(); ++a) {
      for (Eigen::Index b = 0; b < diag.size(); ++b) {
        const auto [ia, ja] = diag.elements()[a];
        const auto [ib, jb] = diag.elements()[b];
        CHECK(restricted(a, b) == full(ia + ja * d, ib + jb * d));
      }
    }
    const DensityMatrix start = thermal_fock_state(n_max, 0.4);
    const Matrix sector_out = Propagator(gen, 0.9, diag).apply(start.matrix());
    const Matrix dense_out = Propagator(gen, 0.9).apply(start.matrix());
    CHECK((sector_out - dense_out).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(trace_distance(steady_state(gen, diag).matrix(), steady_state(gen).matrix()) < 1e-10);
  }
  SUBCASE("a leaking generator is rejected") {
    const Operator drive = annihilation(n_max) + creation(n_max);
    const LindbladGenerator leaky(drive, {});
    CHECK(kind_of([&] { leaky.superoperator(diag); }) == ErrorKind::NonInvariantSector);
  }
  SUBCASE("gather rejects weight outside the sector") {
    Matrix m = Matrix::Zero(n_max + 1, n_max + 1);
    m(0, 1) = 0.1;
    CHECK_THROWS_AS(diag.gather(m), Error);
  }
  SUBCASE("fixed point by eigensolve and by iteration agree") {
    const Propagator p(gen, 0.5, diag);
    const DensityMatrix direct = map_fixed_point(p.map());
    const FixedPointResult iter = power_iterate(p.map(), thermal_fock_state(n_max, 0.0), 1e-13);
    CHECK(iter.converged);
    CHECK(trace_distance(direct.matrix(), iter.state.matrix()) < 1e-10);
    CHECK(trace_distance(direct.matrix(), steady_state(gen).matrix()) < 1e-10);
  }
}
