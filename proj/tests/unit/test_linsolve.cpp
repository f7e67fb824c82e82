#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sblfem/linsolve.hpp"

using namespace sblfem::linalg;

namespace {

// Random sparse matrix with a band structure hidden by a random permutation.
std::vector<Triplet> scrambled_band(std::size_t n, std::size_t bw, bool symmetric, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({perm[i], perm[i], 4.0 * bw + 1.0});
    for (std::size_t j = i + 1; j < std::min(n, i + bw + 1); ++j) {
      const double a = u(rng);
      t.push_back({perm[i], perm[j], a});
      t.push_back({perm[j], perm[i], symmetric ? a : u(rng)});
    }
  }
  return t;
}

Eigen::MatrixXd dense(const CsrMatrix& a) {
  const auto d = a.to_dense();
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = d[i * a.cols() + j];
  return m;
}

}  // namespace

TEST_CASE("from_triplets sums duplicates and sorts columns") {
  const auto a = CsrMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, -1.0}});
  CHECK(a.nonzeros() == 3);
  CHECK(a.at(0, 2) == 1.5);
  CHECK(a.at(0, 0) == 2.0);
  CHECK(a.at(1, 0) == 0.0);
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto y = a.multiply(x);
  CHECK(y[0] == 6.5);
  CHECK(y[1] == -2.0);
  CHECK_THROWS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}));
}

TEST_CASE("RCM recovers a narrow band") {
  std::mt19937_64 rng(3);
  const auto a = CsrMatrix::from_triplets(200, 200, scrambled_band(200, 3, true, rng));
  std::vector<std::size_t> id(200);
  std::iota(id.begin(), id.end(), 0);
  const auto perm = reverse_cuthill_mckee(a);
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == id);
  CHECK(bandwidth(a, perm) <= 6);
  CHECK(bandwidth(a, id) > 50);
}

TEST_CASE("symmetric and nonsymmetric solves agree with Eigen") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (bool sym : {true, false}) {
    const std::size_t n = 150;
    SparseSystem s;
    s.matrix = CsrMatrix::from_triplets(n, n, scrambled_band(n, 4, sym, rng));
    s.symmetric = sym;
    s.rhs.resize(n);
    for (double& b : s.rhs) b = u(rng);
    const auto x = solve_direct(s);
    const Eigen::VectorXd ref = dense(s.matrix).partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(s.rhs.data(), n));
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-11).scale(1.0));
    CHECK(relative_residual(s.matrix, x, s.rhs) < 1e-14);
  }
}

TEST_CASE("symmetric indefinite systems fall back to LU") {
  SparseSystem s;
  s.matrix = CsrMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  s.symmetric = true;
  s.rhs = {2.0, 3.0};
  const auto x = solve_direct(s);
  CHECK(x[0] == doctest::Approx(3.0));
  CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("singular and non-finite systems are reported") {
  SparseSystem s;
  s.matrix = CsrMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}, {2, 2, 1.0}});
  s.rhs = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(solve_direct(s), SingularMatrixError);
  s.matrix = CsrMatrix::from_triplets(1, 1, {{0, 0, std::numeric_limits<double>::quiet_NaN()}});
  s.rhs = {1.0};
  CHECK_THROWS_AS(solve_direct(s), NonFiniteEntryError);
}

TEST_CASE("assembly order does not change the result bit for bit") {
  std::mt19937_64 rng(9);
  auto t = scrambled_band(60, 2, false, rng);
  const auto a = CsrMatrix::from_triplets(60, 60, t);
  std::reverse(t.begin(), t.end());
  const auto b = CsrMatrix::from_triplets(60, 60, t);
  CHECK(a.values().size() == b.values().size());
  CHECK(a.col_index() == b.col_index());
}
