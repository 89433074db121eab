#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "shearguide/eigcore.hpp"

using namespace shearguide;

namespace {

Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed, double shift) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transpose() / static_cast<double>(n) + shift * Eigen::MatrixXd::Identity(n, n);
}

// Sparse banded SPD pencil: a 1D Laplacian plus a random diagonal potential; mass is a perturbed identity.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> banded_pencil(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n), m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 2.0 + 5.0 * u(rng);
    m(i, i) = 1.0 + 0.5 * u(rng);
    if (i + 1 < n) {
      a(i, i + 1) = a(i + 1, i) = -1.0;
      m(i, i + 1) = m(i + 1, i) = 0.1 * u(rng);
    }
  }
  return {a, m};
}

LinearOperator fd_chain(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0 / (h * h)});
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0 / (h * h)});
      t.push_back({i + 1, i, -1.0 / (h * h)});
    }
  }
  return csr_operator(std::make_shared<const Csr>(Csr::from_triplets(n, n, t)));
}

double fd_chain_eigenvalue(std::size_t n, int j) {
  const double h = 1.0 / static_cast<double>(n + 1);
  return 2.0 / (h * h) * (1.0 - std::cos(j * std::numbers::pi * h));
}

}  // namespace

TEST_CASE("diagonal examples") {
  EigOptions o;
  o.k = 2;
  auto r = smallest_eigenpairs(dense_operator(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix()),
                               identity_operator(3), o);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.all_converged());

  r = smallest_eigenpairs(dense_operator(Eigen::Vector2d(2, 8).asDiagonal().toDenseMatrix()),
                          dense_operator(Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix()), o);
  CHECK(r.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("finite-difference chain matches its closed-form spectrum") {
  const std::size_t n = 100;
  EigOptions o;
  o.k = 3;
  o.tol = 1e-10;
  const auto r = smallest_eigenpairs(fd_chain(n), identity_operator(n), o);
  REQUIRE(r.all_converged());
  for (int j = 1; j <= 3; ++j) {
    CHECK(std::abs(r.eigenvalues[static_cast<std::size_t>(j - 1)] / fd_chain_eigenvalue(n, j) - 1.0) < 1e-10);
  }
  // Threshold at the midpoint between the 4th and 5th eigenvalues.
  const double thr = 0.5 * (fd_chain_eigenvalue(n, 4) + fd_chain_eigenvalue(n, 5));
  EigOptions c;
  c.k = 1;
  const auto cnt = count_below(fd_chain(n), identity_operator(n), thr, 0.0, c);
  CHECK(cnt.count == 4);
  CHECK_FALSE(cnt.boundary);
}

TEST_CASE("count_below examples") {
  const auto a = dense_operator(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix());
  EigOptions o;
  auto c = count_below(a, identity_operator(3), 2.5, 0.0, o);
  CHECK(c.count == 2);
  CHECK_FALSE(c.boundary);
  c = count_below(a, identity_operator(3), 2.0, 0.1, o);
  CHECK(c.count == 1);
  CHECK(c.boundary);
}

TEST_CASE("matches the dense oracle to 1e-10 on pencils up to n = 400") {
  for (const Eigen::Index n : {80, 150, 400}) {
    const auto [a, m] = banded_pencil(n, static_cast<std::uint64_t>(n));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
    EigOptions o;
    o.k = 5;
    o.tol = 1e-11;
    const auto r = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
    REQUIRE(r.all_converged());
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(r.eigenvalues[static_cast<std::size_t>(j)] / es.eigenvalues()(j) - 1.0) < 1e-10);
    }
    // M-orthonormal vectors.
    const Eigen::MatrixXd g = r.vectors.transpose() * m * r.vectors;
    CHECK((g - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-10);
  }
  const Eigen::MatrixXd a = random_spd(120, 9, 0.5), m = random_spd(120, 10, 1.0);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
  EigOptions o;
  o.k = 4;
  o.tol = 1e-11;
  const auto r = smallest_eigenpairs(dense_operator(a), dense_operator(m), o, nullptr);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(r.eigenvalues[static_cast<std::size_t>(j)] / es.eigenvalues()(j) - 1.0) < 1e-10);
}

TEST_CASE("preconditioning does not change the answer") {
  const auto [a, m] = banded_pencil(300, 5);
  EigOptions o;
  o.k = 4;
  o.tol = 1e-10;
  const auto plain = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  const auto pre = jacobi_preconditioner(a.diagonal());
  const auto prec = smallest_eigenpairs(dense_operator(a), dense_operator(m), o, &pre);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(plain.eigenvalues[static_cast<std::size_t>(j)] - prec.eigenvalues[static_cast<std::size_t>(j)]) <
          1e-9 * plain.eigenvalues[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("results are reproducible for a fixed seed") {
  const auto [a, m] = banded_pencil(200, 3);
  EigOptions o;
  o.k = 3;
  o.seed = 1234;
  const auto r1 = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  const auto r2 = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  CHECK(r1.eigenvalues == r2.eigenvalues);
  CHECK(r1.vectors == r2.vectors);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("deleting a degree of freedom never lowers an eigenvalue") {
  const auto [a, m] = banded_pencil(160, 21);
  EigOptions o;
  o.k = 4;
  o.tol = 1e-11;
  const auto full = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  for (const Eigen::Index del : {0, 37, 159}) {
    const Eigen::Index n = a.rows() - 1;
    Eigen::MatrixXd ar(n, n), mr(n, n);
    for (Eigen::Index i = 0, ii = 0; i < a.rows(); ++i) {
      if (i == del) continue;
      for (Eigen::Index j = 0, jj = 0; j < a.cols(); ++j) {
        if (j == del) continue;
        ar(ii, jj) = a(i, j);
        mr(ii, jj) = m(i, j);
        ++jj;
      }
      ++ii;
    }
    const auto sub = smallest_eigenpairs(dense_operator(ar), dense_operator(mr), o);
    for (int j = 0; j < 4; ++j) {
      CHECK(sub.eigenvalues[static_cast<std::size_t>(j)] >= full.eigenvalues[static_cast<std::size_t>(j)] * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("warm start from converged vectors finishes immediately") {
  const auto [a, m] = banded_pencil(250, 8);
  EigOptions o;
  o.k = 3;
  const auto r = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  o.initial = r.vectors;
  const auto w = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  CHECK(w.iterations <= 2);
  CHECK(w.eigenvalues[0] == doctest::Approx(r.eigenvalues[0]).epsilon(1e-12));
}

TEST_CASE("invalid inputs are rejected") {
  EigOptions o;
  CHECK_THROWS_AS(smallest_eigenpairs(identity_operator(3), identity_operator(4), o), ValidationError);
  o.k = 0;
  CHECK_THROWS_AS(smallest_eigenpairs(identity_operator(3), identity_operator(3), o), ValidationError);
  o.k = 1;
  o.tol = 0.0;
  CHECK_THROWS_AS(smallest_eigenpairs(identity_operator(3), identity_operator(3), o), ValidationError);
}

TEST_CASE("indefinite mass is detected") {
  EigOptions o;
  o.k = 2;
  Eigen::VectorXd md = Eigen::VectorXd::Ones(150);
  md(7) = -1.0;
  const auto [a, m] = banded_pencil(150, 2);
  CHECK_THROWS_AS(smallest_eigenpairs(dense_operator(a), dense_operator(md.asDiagonal().toDenseMatrix()), o),
                  SolverError);
  CHECK_THROWS_AS(smallest_eigenpairs(identity_operator(5), dense_operator(-Eigen::MatrixXd::Identity(5, 5)), o),
                  SolverError);
  CHECK(min_probe_energy(dense_operator(-Eigen::MatrixXd::Identity(5, 5))) < 0.0);
}

TEST_CASE("probe diagnostics") {
  const auto [a, m] = banded_pencil(50, 4);
  CHECK(linearity_defect(dense_operator(a)) < 1e-14);
  CHECK(symmetry_defect(dense_operator(a)) < 1e-14);
  Eigen::MatrixXd skew = a;
  skew(0, 1) += 1.0;
  CHECK(symmetry_defect(dense_operator(skew)) > 1e-6);
  CHECK(min_probe_energy(dense_operator(m)) > 0.0);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto [a, m] = banded_pencil(300, 6);
  EigOptions o;
  o.k = 3;
  o.max_iterations = 2;
  o.tol = 1e-14;
  const auto r = smallest_eigenpairs(dense_operator(a), dense_operator(m), o);
  CHECK_FALSE(r.all_converged());
  CHECK(r.eigenvalues.size() == 3);
}
