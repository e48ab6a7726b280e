#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mirrorclust/errors.hpp"
#include "mirrorclust/numkernel.hpp"
#include "test_support.hpp"

using namespace mirrorclust;
using mirrorclust::testing::gaussian_matrix;
using mirrorclust::testing::random_orthogonal;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  const Eigen::MatrixXd g = gaussian_matrix(rng, n, n);
  return 0.5 * (g + g.transpose());
}

void check_eig(const Eigen::MatrixXd& a, const SymEig& e) {
  const double scale = std::max(a.norm(), 1.0);
  const auto n = a.rows();
  CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(e.vectors.cols(), e.vectors.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (Eigen::Index j = 0; j < e.values.size(); ++j) {
    CHECK((a * e.vectors.col(j) - e.values[j] * e.vectors.col(j)).norm() <= 1e-9 * scale);
  }
  if (e.vectors.cols() == n) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) CHECK(e.values[j] >= e.values[j + 1]);
    CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).norm() <= 1e-9 * scale);
  }
}

}  // namespace

TEST_CASE("sym_eig on a diagonal matrix returns sorted values and unit vectors") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 3;
  const SymEig e = sym_eig(a);
  CHECK(e.values[0] == doctest::Approx(3.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig on [[2,1],[1,2]] matches the characteristic polynomial") {
  // (2 - l)^2 - 1 = 0 gives l = 3 with (1,1)/sqrt2 and l = 1 with (1,-1)/sqrt2.
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 2;
  const SymEig e = sym_eig(a);
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(h));
  CHECK(e.vectors(0, 0) * e.vectors(1, 0) > 0.0);
  CHECK(e.vectors(0, 1) * e.vectors(1, 1) < 0.0);
  check_eig(a, e);
}

TEST_CASE("sym_eig of a zero matrix is all zeros") {
  for (const int n : {1, 3, 7}) {
    const SymEig e = sym_eig(Eigen::MatrixXd::Zero(n, n));
    CHECK(e.values.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sym_eig rejects non-square and asymmetric input") {
  CHECK_THROWS_AS(sym_eig(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 0, 1;
  CHECK_THROWS_AS(sym_eig(a), ShapeError);
}

TEST_CASE("sym_eig column signs put the largest entry positive") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd a = random_symmetric(rng, 9);
  const SymEig e = sym_eig(a);
  for (Eigen::Index j = 0; j < 9; ++j) {
    Eigen::Index arg = 0;
    e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(e.vectors(arg, j) > 0.0);
  }
}

TEST_CASE("sym_eig invariants on random symmetric matrices") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd a = random_symmetric(rng, 2 + rep);
    check_eig(a, sym_eig(a));
  }
}

TEST_CASE("PartialSymEig agrees with the full decomposition") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 5 + 7 * rep;
    const Eigen::MatrixXd a = random_symmetric(rng, n);
    const PartialSymEig part(a);
    const SymEig full = sym_eig(a);
    CHECK((part.values() - full.values).cwiseAbs().maxCoeff() <= 1e-10 * a.norm());
    const std::vector<Eigen::Index> which{0, n - 1, n / 2};
    const SymEig sel = part.select(which);
    check_eig(a, sel);
    for (std::size_t j = 0; j < which.size(); ++j) {
      // Same sign convention, so columns agree without alignment.
      CHECK((sel.vectors.col(static_cast<Eigen::Index>(j)) - full.vectors.col(which[j])).norm() <
            1e-8);
    }
  }
}

TEST_CASE("PartialSymEig falls back for clustered or degenerate selections") {
  const PartialSymEig zero(Eigen::MatrixXd::Zero(4, 4));
  const std::vector<Eigen::Index> which{0, 1};
  const SymEig z = zero.select(which);
  CHECK(z.vectors.cols() == 2);
  CHECK(std::abs(z.vectors.col(0).dot(z.vectors.col(1))) < 1e-12);

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 5);
  a(4, 4) = -2.0;
  const SymEig sel = PartialSymEig(a).select(which);
  check_eig(a, sel);
}

TEST_CASE("svd of simple matrices") {
  CHECK(svd(Eigen::MatrixXd::Identity(2, 2)).s.isApprox(Eigen::Vector2d(1, 1)));
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(svd(swap).s.isApprox(Eigen::Vector2d(1, 1)));
  Eigen::MatrixXd d(2, 2);
  d << 5, 0, 0, 0;
  const Svd f = svd(d);
  CHECK(f.s[0] == doctest::Approx(5.0));
  CHECK(f.s[1] == doctest::Approx(0.0));
}

TEST_CASE("svd reconstructs random matrices") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd m = gaussian_matrix(rng, 3 + rep, 2 + rep % 4);
    const Svd f = svd(m);
    CHECK((f.u * f.s.asDiagonal() * f.v.transpose() - m).norm() <= 1e-9 * m.norm());
    for (Eigen::Index j = 0; j + 1 < f.s.size(); ++j) CHECK(f.s[j] >= f.s[j + 1]);
  }
}

TEST_CASE("procrustes_align on identity and permutation") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK((procrustes_align(id, id) - id).norm() < 1e-14);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((procrustes_align(id, swap) - swap).norm() < 1e-14);
  CHECK_THROWS_AS(procrustes_align(id, Eigen::MatrixXd::Identity(3, 2)), ShapeError);
}

TEST_CASE("procrustes_align beats every rotation/reflection on the grid") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd x1 = gaussian_matrix(rng, 5, 2);
    const Eigen::MatrixXd x2 = gaussian_matrix(rng, 5, 2);
    const Eigen::MatrixXd o = procrustes_align(x1, x2);
    CHECK((o.transpose() * o - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    const double achieved = (x1 * o - x2).norm();
    CHECK(achieved <= mirrorclust::testing::brute_force_procrustes_2d(x1, x2) + 1e-12);
  }
}

TEST_CASE("procrustes_cost closed-form examples") {
  Eigen::MatrixXd x1(2, 1);
  x1 << 1, 2;
  Eigen::MatrixXd x2(2, 1);
  x2 << 2, 1;
  // O = +1 gives sqrt(2), O = -1 gives sqrt(18).
  CHECK(procrustes_cost(x1, x2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(procrustes_cost(x1, x1) == 0.0);
  CHECK_THROWS_AS(procrustes_cost(x1, Eigen::MatrixXd::Zero(3, 1)), ShapeError);
  CHECK(procrustes_cost(Eigen::MatrixXd::Zero(4, 2), Eigen::MatrixXd::Zero(4, 2)) == 0.0);
}

TEST_CASE("procrustes_cost vanishes under an orthogonal transform") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 1 + rep % 4;
    const Eigen::MatrixXd x = gaussian_matrix(rng, 20 + rep, d);
    CHECK(procrustes_cost(x, x * random_orthogonal(rng, d)) < 1e-10);
  }
}

TEST_CASE("procrustes_cost is a pseudometric invariant to orthogonal transforms") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Index n = 3 + rep % 8;
    const Eigen::Index d = 1 + rep % 3;
    const Eigen::MatrixXd a = gaussian_matrix(rng, n, d);
    const Eigen::MatrixXd b = gaussian_matrix(rng, n, d);
    const Eigen::MatrixXd c = gaussian_matrix(rng, n, d);
    const double ab = procrustes_cost(a, b);
    const double bc = procrustes_cost(b, c);
    const double ac = procrustes_cost(a, c);
    CHECK(ab == doctest::Approx(procrustes_cost(b, a)).epsilon(1e-12));
    CHECK(ac <= ab + bc + 1e-8);
    const double rotated =
        procrustes_cost(a * random_orthogonal(rng, d), b * random_orthogonal(rng, d));
    CHECK(std::abs(rotated - ab) < 1e-9);
  }
}
