#include "lpq/sparse_lu.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace lpq {

std::vector<int> amd_order(const SpMat& A) {
  Eigen::SparseMatrix<double> P = A;
  Eigen::SparseMatrix<double> Pt = P.transpose();
  P = P + Pt;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  Eigen::AMDOrdering<int> amd;
  amd(P, perm);
  return std::vector<int>(perm.indices().data(), perm.indices().data() + perm.size());
}

void DirectSolver::compute(const SpMat& A0, std::vector<int> order) {
  n_ = A0.rows();
  if (A0.cols() != n_) throw std::invalid_argument("solver: square matrix required");
  if (order.empty()) {
    order.resize(n_);
    std::iota(order.begin(), order.end(), 0);
  }
  if (static_cast<long>(order.size()) != n_) throw std::invalid_argument("solver: bad ordering");
  order_ = std::move(order);
  inv_.assign(n_, 0);
  for (long k = 0; k < n_; ++k) inv_[order_[k]] = static_cast<int>(k);
  fallback_.reset();
  fallback_t_.reset();

  // permuted matrix and a symmetric SPD surrogate with the symmetrised pattern
  std::vector<Eigen::Triplet<double>> tp, ts;
  tp.reserve(A0.nonZeros());
  ts.reserve(2 * A0.nonZeros() + n_);
  for (long i = 0; i < n_; ++i) {
    ts.emplace_back(i, i, 1.0);
    for (SpMat::InnerIterator it(A0, i); it; ++it) {
      int r = inv_[i], c = inv_[it.col()];
      tp.emplace_back(r, c, it.value());
      if (r != c) {
        ts.emplace_back(r, c, 0.0);
        ts.emplace_back(c, r, 0.0);
      }
    }
  }
  SpMat A(n_, n_);
  A.setFromTriplets(tp.begin(), tp.end());
  Eigen::SparseMatrix<double> P(n_, n_);
  P.setFromTriplets(ts.begin(), ts.end());
  // give the surrogate diagonal dominance so its Cholesky pattern is the full symbolic fill
  for (long k = 0; k < P.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(P, k); it; ++it)
      it.valueRef() = it.row() == it.col() ? 1e6 : 1e-6;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> chol(P);
  if (chol.info() != Eigen::Success) throw std::runtime_error("solver: symbolic analysis failed");
  Eigen::SparseMatrix<double> Lc = chol.matrixL();
  SpMat Lr = Lc;

  Up_.assign(n_ + 1, 0);
  Ui_.clear();
  for (long k = 0; k < n_; ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(Lc, k); it; ++it) Ui_.push_back(static_cast<int>(it.row()));
    Up_[k + 1] = static_cast<int>(Ui_.size());
  }
  Ux_.assign(Ui_.size(), 0.0);
  Lp_.assign(n_ + 1, 0);
  Li_.clear();
  Lx_.clear();
  Li_.reserve(Ui_.size());
  Lx_.reserve(Ui_.size());

  std::vector<double> w(n_, 0.0);
  bool bad = false;
  for (long i = 0; i < n_ && !bad; ++i) {
    double amax = 0.0;
    for (SpMat::InnerIterator it(A, i); it; ++it) {
      w[it.col()] = it.value();
      amax = std::max(amax, std::fabs(it.value()));
    }
    for (SpMat::InnerIterator it(Lr, i); it; ++it) {
      int k = static_cast<int>(it.col());
      if (k == i) break;
      double lk = w[k] / Ux_[Up_[k]];
      w[k] = 0.0;
      Li_.push_back(k);
      Lx_.push_back(lk);
      for (int q = Up_[k] + 1; q < Up_[k + 1]; ++q) w[Ui_[q]] -= lk * Ux_[q];
    }
    Lp_[i + 1] = static_cast<int>(Li_.size());
    for (int q = Up_[i]; q < Up_[i + 1]; ++q) {
      Ux_[q] = w[Ui_[q]];
      w[Ui_[q]] = 0.0;
    }
    double piv = Ux_[Up_[i]];
    if (!std::isfinite(piv) || std::fabs(piv) <= 1e-13 * amax) bad = true;
  }
  if (bad) {
    Eigen::SparseMatrix<double> Ac = A0;
    fallback_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    fallback_->compute(Ac);
    if (fallback_->info() != Eigen::Success) throw std::runtime_error("solver: factorisation failed");
    At_ = Ac.transpose();
    fallback_t_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    fallback_t_->compute(At_);
    Li_.clear();
    Lx_.clear();
    Ui_.clear();
    Ux_.clear();
  }
}

namespace {

inline void axpy_row(double* __restrict y, const double* __restrict x, double a, long nc) {
  for (long c = 0; c < nc; ++c) y[c] -= a * x[c];
}

}  // namespace

void DirectSolver::lower(RowMat& X) const {
  const long nc = X.cols();
  double* base = X.data();
  for (long i = 0; i < n_; ++i) {
    double* xi = base + i * nc;
    for (int q = Lp_[i]; q < Lp_[i + 1]; ++q) axpy_row(xi, base + static_cast<long>(Li_[q]) * nc, Lx_[q], nc);
  }
}

void DirectSolver::upper(RowMat& X) const {
  const long nc = X.cols();
  double* base = X.data();
  for (long i = n_ - 1; i >= 0; --i) {
    double* xi = base + i * nc;
    for (int q = Up_[i] + 1; q < Up_[i + 1]; ++q) axpy_row(xi, base + static_cast<long>(Ui_[q]) * nc, Ux_[q], nc);
    const double inv = 1.0 / Ux_[Up_[i]];
    for (long c = 0; c < nc; ++c) xi[c] *= inv;
  }
}

void DirectSolver::upper_t(RowMat& X) const {
  const long nc = X.cols();
  double* base = X.data();
  for (long k = 0; k < n_; ++k) {
    double* xk = base + k * nc;
    const double inv = 1.0 / Ux_[Up_[k]];
    for (long c = 0; c < nc; ++c) xk[c] *= inv;
    for (int q = Up_[k] + 1; q < Up_[k + 1]; ++q) axpy_row(base + static_cast<long>(Ui_[q]) * nc, xk, Ux_[q], nc);
  }
}

void DirectSolver::lower_t(RowMat& X) const {
  const long nc = X.cols();
  double* base = X.data();
  for (long i = n_ - 1; i >= 0; --i) {
    const double* xi = base + i * nc;
    for (int q = Lp_[i]; q < Lp_[i + 1]; ++q) axpy_row(base + static_cast<long>(Li_[q]) * nc, xi, Lx_[q], nc);
  }
}

void DirectSolver::to_order(const RowMat& X, RowMat& Y) const {
  Y.resize(n_, X.cols());
  for (long k = 0; k < n_; ++k) Y.row(k) = X.row(order_[k]);
}

void DirectSolver::from_order(const RowMat& Y, RowMat& X) const {
  X.resize(n_, Y.cols());
  for (long k = 0; k < n_; ++k) X.row(order_[k]) = Y.row(k);
}

void DirectSolver::solve_in_order(RowMat& Y) const {
  lower(Y);
  upper(Y);
}

void DirectSolver::solve_transpose_in_order(RowMat& Y) const {
  upper_t(Y);
  lower_t(Y);
}

SpMat DirectSolver::permuted(const SpMat& A) const {
  std::vector<Eigen::Triplet<double>> tp;
  tp.reserve(A.nonZeros());
  for (long i = 0; i < A.outerSize(); ++i)
    for (SpMat::InnerIterator it(A, i); it; ++it) tp.emplace_back(inv_[i], inv_[it.col()], it.value());
  SpMat P(n_, n_);
  P.setFromTriplets(tp.begin(), tp.end());
  return P;
}

void DirectSolver::solve(RowMat& X) const {
  if (X.rows() != n_) throw std::invalid_argument("solver: rhs size mismatch");
  if (fallback_) {
    Eigen::MatrixXd B = X;
    Eigen::MatrixXd Y = fallback_->solve(B);
    X = Y;
    return;
  }
  RowMat Y;
  to_order(X, Y);
  solve_in_order(Y);
  from_order(Y, X);
}

void DirectSolver::solve_transpose(RowMat& X) const {
  if (X.rows() != n_) throw std::invalid_argument("solver: rhs size mismatch");
  if (fallback_) {
    Eigen::MatrixXd B = X;
    Eigen::MatrixXd Y = fallback_t_->solve(B);
    X = Y;
    return;
  }
  RowMat Y;
  to_order(X, Y);
  solve_transpose_in_order(Y);
  from_order(Y, X);
}

void DirectSolver::solve(Eigen::VectorXd& x) const {
  RowMat X = x;
  solve(X);
  x = X.col(0);
}

void DirectSolver::solve_transpose(Eigen::VectorXd& x) const {
  RowMat X = x;
  solve_transpose(X);
  x = X.col(0);
}

}  // namespace lpq
