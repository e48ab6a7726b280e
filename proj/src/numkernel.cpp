#include "mirrorclust/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "mirrorclust/errors.hpp"

namespace mirrorclust {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

std::string shape_of(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_symmetric(const Eigen::MatrixXd& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(op) + ": matrix is not square (" + shape_of(a) + ")");
  }
  if (!a.allFinite()) {
    throw DomainError(std::string(op) + ": matrix has non-finite entries");
  }
  const double asym = a.rows() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os << op << ": matrix is not symmetric (max |A - A^T| = " << asym << ")";
    throw ShapeError(os.str());
  }
}

// LU factorization with partial pivoting of a shifted symmetric tridiagonal
// matrix, kept in the LAPACK gttrf layout so repeated solves are O(n).
class ShiftedTridiagonalLu {
 public:
  ShiftedTridiagonalLu(const Eigen::VectorXd& diag, const Eigen::VectorXd& subdiag,
                       double shift, double tiny)
      : n_(diag.size()),
        dl_(subdiag),
        d_(diag.array() - shift),
        du_(subdiag),
        du2_(Eigen::VectorXd::Zero(std::max<Eigen::Index>(n_ - 2, 0))),
        pivoted_(static_cast<std::size_t>(std::max<Eigen::Index>(n_ - 1, 0)), false) {
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] != 0.0) {
          const double fact = dl_[i] / d_[i];
          dl_[i] = fact;
          d_[i + 1] -= fact * du_[i];
        }
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        pivoted_[static_cast<std::size_t>(i)] = true;
      }
    }
    // A computed eigenvalue makes the shifted matrix singular to working
    // precision; a tiny pivot keeps the solve finite and amplifies the
    // wanted direction.
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (std::abs(d_[i]) < tiny) d_[i] = d_[i] < 0.0 ? -tiny : tiny;
    }
  }

  void solve_in_place(Eigen::VectorXd& b) const {
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      if (!pivoted_[static_cast<std::size_t>(i)]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (Eigen::Index i = n_ - 3; i >= 0; --i) {
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }
  }

 private:
  Eigen::Index n_;
  Eigen::VectorXd dl_;
  Eigen::VectorXd d_;
  Eigen::VectorXd du_;
  Eigen::VectorXd du2_;
  std::vector<bool> pivoted_;
};

}  // namespace

void canonicalize_column_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double v = std::abs(vectors(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (vectors.rows() > 0 && vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

SymEig sym_eig(const Eigen::MatrixXd& a) {
  require_symmetric(a, "sym_eig");
  const Eigen::Index n = a.rows();
  if (n == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig: eigendecomposition did not converge for " + shape_of(a) +
                       " matrix");
  }
  SymEig out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
  canonicalize_column_signs(out.vectors);
  return out;
}

Svd svd(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) {
    throw NumericError("svd: " + shape_of(m) + " matrix has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols()) {
    throw ShapeError("procrustes_align: shapes differ (" + shape_of(x1) + " vs " +
                     shape_of(x2) + ")");
  }
  const Svd f = svd(x1.transpose() * x2);
  return f.u * f.v.transpose();
}

double procrustes_cost(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols()) {
    throw ShapeError("procrustes_cost: shapes differ (" + shape_of(x1) + " vs " +
                     shape_of(x2) + ")");
  }
  const double norms = x1.squaredNorm() + x2.squaredNorm();
  if (norms == 0.0) return 0.0;
  const Svd f = svd(x1.transpose() * x2);
  const double sq = norms - 2.0 * f.s.sum();
  // The trace form cancels catastrophically when the optimum is near zero;
  // there the residual is formed explicitly.
  if (sq <= 1e-4 * norms) {
    const Eigen::MatrixXd o = f.u * f.v.transpose();
    return (x1 * o - x2).norm();
  }
  return std::sqrt(sq);
}

PartialSymEig::PartialSymEig(const Eigen::MatrixXd& a) : a_(a) {
  require_symmetric(a, "PartialSymEig");
  if (a.rows() == 0) return;
  tri_.compute(a);
  diag_ = tri_.diagonal();
  subdiag_ = tri_.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag_, subdiag_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("PartialSymEig: eigenvalues did not converge for " + shape_of(a) +
                       " matrix");
  }
  values_ = solver.eigenvalues().reverse();
  scale_ = values_.cwiseAbs().maxCoeff();
}

Eigen::VectorXd PartialSymEig::tridiagonal_vector(double lambda) const {
  const Eigen::Index n = diag_.size();
  const double eps = std::numeric_limits<double>::epsilon();
  const ShiftedTridiagonalLu lu(diag_, subdiag_, lambda, eps * scale_);

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = unit(rng);
  x.normalize();

  const double tol = 1e-11 * scale_;
  for (int iter = 0; iter < 6; ++iter) {
    lu.solve_in_place(x);
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm == 0.0) return {};
    x /= norm;
    if (iter < 1) continue;
    Eigen::VectorXd r = diag_.cwiseProduct(x) - lambda * x;
    r.head(n - 1) += subdiag_.cwiseProduct(x.tail(n - 1));
    r.tail(n - 1) += subdiag_.cwiseProduct(x.head(n - 1));
    if (r.norm() <= tol) return x;
  }
  return {};
}

SymEig PartialSymEig::select(std::span<const Eigen::Index> which) const {
  const Eigen::Index n = values_.size();
  const auto k = static_cast<Eigen::Index>(which.size());
  for (const Eigen::Index idx : which) {
    if (idx < 0 || idx >= n) throw DomainError("PartialSymEig::select: index out of range");
  }

  SymEig out;
  out.values.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) out.values[j] = values_[which[j]];

  const auto full = [&] {
    SymEig all = sym_eig(a_);
    out.vectors.resize(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      out.values[j] = all.values[which[j]];
      out.vectors.col(j) = all.vectors.col(which[j]);
    }
    return out;
  };

  if (scale_ == 0.0) return full();
  // Inverse iteration gives no orthogonality guarantee inside a cluster.
  const double cluster_gap = 1e-5 * scale_;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      if (which[i] == which[j] || std::abs(out.values[i] - out.values[j]) < cluster_gap) {
        return full();
      }
    }
  }

  Eigen::MatrixXd tri_vectors(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd x = tridiagonal_vector(out.values[j]);
    if (x.size() == 0) return full();
    tri_vectors.col(j) = x;
  }
  out.vectors = tri_.matrixQ() * tri_vectors;
  canonicalize_column_signs(out.vectors);
  return out;
}

}  // namespace mirrorclust
