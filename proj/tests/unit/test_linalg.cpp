#include <random>

#include "doctest.h"
#include "shearguide/kron.hpp"
#include "shearguide/linalg.hpp"

using namespace shearguide;

namespace {
std::span<const double> cs(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> ms(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }


Csr random_sparse(std::size_t n, std::uint64_t seed, double density = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p(rng) < density) t.push_back({i, j, u(rng)});
  return Csr::from_triplets(n, n, t);
}

Eigen::MatrixXd dense_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

}  // namespace

TEST_CASE("triplets with repeated positions are summed") {
  const Csr a = Csr::from_triplets(2, 2, {{1, 0, 2.0}, {0, 1, 1.0}, {1, 0, 3.0}});
  CHECK(a.nnz() == 2);
  CHECK(a.at(1, 0) == 5.0);
  CHECK(a.at(0, 1) == 1.0);
  CHECK(a.at(0, 0) == 0.0);
  CHECK_THROWS_AS(Csr::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST_CASE("csr products, transpose and kron agree with dense arithmetic") {
  const Csr a = random_sparse(5, 1), b = random_sparse(4, 2);
  const Eigen::MatrixXd da = a.to_dense(), db = b.to_dense();
  CHECK((a.transposed().to_dense() - da.transpose()).norm() == 0.0);
  CHECK((kron(a, b).to_dense() - dense_kron(da, db)).norm() < 1e-14);
  CHECK((add(a, a.transposed(), 2.0, -1.0).to_dense() - (2.0 * da - da.transpose())).norm() < 1e-14);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -1.0, 2.0), y(5), z(5);
  a.multiply(cs(x), ms(y));
  a.multiply_serial(cs(x), ms(z));
  CHECK((y - da * x).norm() < 1e-14);
  CHECK(y == z);
}

TEST_CASE("kronecker operator matches its assembled matrix") {
  const Csr f0 = random_sparse(4, 3), f1 = random_sparse(3, 4), f2 = random_sparse(5, 5), g2 = random_sparse(5, 6);
  KronOperator op({4, 3, 5});
  const auto i0 = op.add_factor(f0), i1 = op.add_factor(f1), i2 = op.add_factor(f2), j2 = op.add_factor(g2);
  op.add_term(1.5, {i0, i1, i2});
  op.add_term(-0.5, {KronOperator::identity_factor, i1, j2});
  op.add_term(2.0, {i0, KronOperator::identity_factor, KronOperator::identity_factor});
  op.add_term(0.25, {KronOperator::identity_factor, KronOperator::identity_factor, KronOperator::identity_factor});

  const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3), i4 = Eigen::MatrixXd::Identity(4, 4),
                        i5 = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd dense = 1.5 * dense_kron(f0.to_dense(), dense_kron(f1.to_dense(), f2.to_dense())) -
                                0.5 * dense_kron(i4, dense_kron(f1.to_dense(), g2.to_dense())) +
                                2.0 * dense_kron(f0.to_dense(), dense_kron(i3, i5)) +
                                0.25 * Eigen::MatrixXd::Identity(60, 60);
  CHECK((op.assemble().to_dense() - dense).norm() < 1e-13);
  CHECK((op.diagonal() - dense.diagonal()).norm() < 1e-13);

  Eigen::VectorXd x = Eigen::VectorXd::Random(60), y(60), z(60);
  op.apply(cs(x), ms(y));
  op.apply_serial(cs(x), ms(z));
  CHECK((y - dense * x).norm() < 1e-12 * (dense * x).norm());
  CHECK((y - z).norm() == 0.0);
}

TEST_CASE("kronecker operator rejects inconsistent terms") {
  KronOperator op({3, 4});
  const auto f = op.add_factor(Csr::identity(3));
  CHECK_THROWS(op.add_term(1.0, {f}));
  CHECK_THROWS(op.add_term(1.0, {f, f}));
  CHECK_THROWS(op.add_factor(Csr::from_triplets(2, 3, {})));
}
