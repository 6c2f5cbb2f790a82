#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <vector>

namespace lpq {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// approximate minimum degree on the symmetrised pattern, order[new] = old
std::vector<int> amd_order(const SpMat& A);

// LU without pivoting in a fill-reducing symmetric ordering. Intended for
// matrices whose symmetric part is positive definite (M + theta dt S in the
// steppers); falls back to partial-pivoting SparseLU when a pivot degenerates.
class DirectSolver {
public:
  DirectSolver() = default;
  DirectSolver(const SpMat& A, std::vector<int> order) { compute(A, std::move(order)); }

  void compute(const SpMat& A, std::vector<int> order);
  // solves A X = B in place, B holds one right-hand side per column
  void solve(RowMat& X) const;
  void solve(Eigen::VectorXd& x) const;
  void solve_transpose(RowMat& X) const;
  void solve_transpose(Eigen::VectorXd& x) const;

  // the same solves on data already stored in factor order (no fallback)
  bool in_order_available() const { return !fallback_; }
  void to_order(const RowMat& X, RowMat& Y) const;
  void from_order(const RowMat& Y, RowMat& X) const;
  void solve_in_order(RowMat& Y) const;
  void solve_transpose_in_order(RowMat& Y) const;
  SpMat permuted(const SpMat& A) const;  // P A P^T in factor order

  long rows() const { return n_; }
  long nnz_factors() const { return static_cast<long>(Lx_.size() + Ux_.size()); }
  bool used_fallback() const { return static_cast<bool>(fallback_); }

private:
  void lower(RowMat& X) const;
  void upper(RowMat& X) const;
  void upper_t(RowMat& X) const;
  void lower_t(RowMat& X) const;

  long n_ = 0;
  std::vector<int> order_, inv_;
  std::vector<int> Lp_, Li_, Up_, Ui_;
  std::vector<double> Lx_, Ux_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> fallback_;
  Eigen::SparseMatrix<double> At_;  // only for the fallback transpose solve
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> fallback_t_;
};

}  // namespace lpq
