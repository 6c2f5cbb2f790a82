#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lpq/evolution.hpp"
#include "lpq/interval.hpp"
#include "lpq/metric.hpp"

namespace lpq {

struct KernelBlock {
  double t = 0;
  long y_node = -1, y_interior = -1;
  int m = 1;
  RowMat values;              // (m N) x m, column j = k(t, ., y) e_j on interior nodes
  std::vector<double> dist;   // per grid node, from y
  std::vector<double> rhs;    // per grid node
};

// columns of the discrete kernel for the sources (interior index, component),
// one result per requested time (times increasing, multiples of dt)
std::vector<RowMat> kernel_columns(const Stepper& st, const std::vector<std::pair<long, int>>& sources,
                                   const std::vector<double>& times, bool adjoint = false);
Eigen::VectorXd kernel_column(const Stepper& st, long y_interior, int j, double t);

// all m columns at y for each time, with distances and bound filled in
std::vector<KernelBlock> kernel_blocks(const Stepper& st, long y_interior, const std::vector<double>& times,
                                       const DistanceMap& dm, const ConstantsBundle& b);

struct GaussianCheck {
  double min_margin = 0;
  long checked = 0, violations = 0;
  long worst_node = -1;
  double worst_value = 0, worst_rhs = 0, worst_dist = 0;
  double ondiag_value = 0, ondiag_rhs = 0;
  bool pass = true;
};
// nodes closer than `margin_cells` cells to the boundary are skipped
GaussianCheck verify_gaussian(const KernelBlock& blk, const BoxDomain& g, int margin_cells = 5);

// max |k(t, y1, y2) - k*(t, y2, y1)^T| with the adjoint via the transposed recursion
double symmetry_check(const Stepper& st, double t, long y1, long y2);

void write_kernel_csv(const std::string& path, const std::vector<KernelBlock>& blocks, const BoxDomain& g);

}  // namespace lpq
