#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lpq/expr.hpp"

namespace lpq {

// Tensor grid over a box. Nodes are x_k = lower_k + i_k h_k, i_k = 0..n_k,
// flattened with axis 0 fastest. Interior nodes (Dirichlet unknowns) use the
// same ordering restricted to 1 <= i_k <= n_k - 1.
struct BoxDomain {
  int d = 1;
  std::vector<double> lower, upper;
  std::vector<int> n;

  BoxDomain() = default;
  BoxDomain(std::vector<double> lo, std::vector<double> hi, std::vector<int> cells);
  static BoxDomain cube(int d, double lo, double hi, int cells);

  double h(int k) const { return (upper[k] - lower[k]) / n[k]; }
  double cell_volume() const;
  long node_count() const;
  long interior_count() const;
  std::vector<int> node_multi(long idx) const;
  long node_index(const std::vector<int>& mi) const;
  std::vector<int> interior_multi(long idx) const;
  long interior_index(const std::vector<int>& mi) const;  // -1 if on the boundary
  long interior_to_node(long idx) const;
  std::vector<double> coords(const std::vector<int>& mi) const;
  void coords(long node, double* x) const;
  bool is_boundary(const std::vector<int>& mi) const;
  // same box, every cell split in two along each axis
  BoxDomain refined() const;
};

using Mat = Eigen::MatrixXd;

struct SampledField {
  int rows = 0, cols = 0;
  std::vector<Mat> values;  // one per grid node
};

// A matrix-valued coefficient: either expressions (null entry = 0) or a raw
// per-node table of the same shape.
struct MatrixField {
  int rows = 0, cols = 0;
  std::vector<Expr> entries;  // row-major
  std::optional<std::vector<Mat>> table;

  MatrixField() = default;
  MatrixField(int r, int c) : rows(r), cols(c), entries(r * c) {}
  bool is_zero() const;
  void set(int i, int j, const std::string& text, int dim);
  Mat at(const double* x, int dim) const;
};

struct CoefficientSystem {
  int d = 1, m = 1;
  MatrixField Q;                              // d x d
  std::vector<std::vector<MatrixField>> A;    // [h][k] m x m, empty = absent
  std::vector<MatrixField> B, C;              // [h] m x m, empty = absent
  MatrixField V, W;                           // m x m

  CoefficientSystem() = default;
  CoefficientSystem(int d, int m);
  bool has_A() const;
  bool has_B() const;
  bool has_C() const;
  bool has_W() const;
};

struct SampledSystem {
  BoxDomain grid;
  int d = 1, m = 1;
  SampledField Q;
  std::vector<std::vector<SampledField>> A;
  std::vector<SampledField> B, C;
  SampledField V, W;
  bool hasA = false, hasB = false, hasC = false, hasW = false;
};

SampledField sample_field(const MatrixField& f, const BoxDomain& grid);
SampledSystem sample(const CoefficientSystem& sys, const BoxDomain& grid);

SampledField symmetric_part(const SampledField& f);
std::vector<double> min_eigen_field(const SampledField& f);
std::vector<double> max_eigen_field(const SampledField& f);

double sym_min_eig(const Mat& s);
double sym_max_eig(const Mat& s);
// inverse square root of a symmetric positive definite matrix
Mat inv_sqrt_spd(const Mat& s);

// CSV raw-table loader: one row per node, entries row-major
std::vector<Mat> load_table_csv(const std::string& path, int rows, int cols, long nodes);

}  // namespace lpq
