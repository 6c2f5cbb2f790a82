#include "lpq/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace lpq {

std::vector<RowMat> kernel_columns(const Stepper& st, const std::vector<std::pair<long, int>>& sources,
                                   const std::vector<double>& times, bool adjoint) {
  const DiscreteForm& F = st.form();
  RowMat X = RowMat::Zero(F.size(), static_cast<long>(sources.size()));
  for (size_t c = 0; c < sources.size(); ++c) {
    auto [y, j] = sources[c];
    if (y < 0 || y >= F.N || j < 0 || j >= F.m) throw std::invalid_argument("kernel: source out of range");
    X(y * F.m + j, c) = 1.0 / F.vol;
  }
  std::vector<RowMat> out;
  long done = 0;
  for (double t : times) {
    if (!(t > 0)) throw std::invalid_argument("kernel: t must be positive");
    long k = st.steps_for(t);
    if (k < done) throw std::invalid_argument("kernel: times must increase");
    if (adjoint)
      st.advance_adjoint(X, k - done);
    else
      st.advance(X, k - done);
    done = k;
    double mx = X.cwiseAbs().maxCoeff();
    if (!std::isfinite(mx) || mx > 1e12 / F.vol) throw BlowUp("kernel: blow-up");
    out.push_back(X);
  }
  return out;
}

Eigen::VectorXd kernel_column(const Stepper& st, long y_interior, int j, double t) {
  return kernel_columns(st, {{y_interior, j}}, {t})[0].col(0);
}

std::vector<KernelBlock> kernel_blocks(const Stepper& st, long y_interior, const std::vector<double>& times,
                                       const DistanceMap& dm, const ConstantsBundle& b) {
  const DiscreteForm& F = st.form();
  std::vector<std::pair<long, int>> src;
  for (int j = 0; j < F.m; ++j) src.emplace_back(y_interior, j);
  auto cols = kernel_columns(st, src, times);
  std::vector<KernelBlock> out;
  for (size_t i = 0; i < times.size(); ++i) {
    KernelBlock k;
    k.t = times[i];
    k.y_interior = y_interior;
    k.y_node = F.grid.interior_to_node(y_interior);
    k.m = F.m;
    k.values = std::move(cols[i]);
    k.dist = dm.dist;
    k.rhs.resize(dm.dist.size());
    for (size_t n = 0; n < dm.dist.size(); ++n) k.rhs[n] = gaussian_bound_rhs(b, k.t, dm.dist[n]);
    out.push_back(std::move(k));
  }
  return out;
}

GaussianCheck verify_gaussian(const KernelBlock& blk, const BoxDomain& g, int margin_cells) {
  GaussianCheck r;
  r.min_margin = std::numeric_limits<double>::infinity();
  const int m = blk.m;
  const long N = g.interior_count();
  for (long x = 0; x < N; ++x) {
    std::vector<int> mi = g.interior_multi(x);
    bool deep = true;
    for (int k = 0; k < g.d; ++k) deep = deep && mi[k] >= margin_cells && g.n[k] - mi[k] >= margin_cells;
    if (!deep) continue;
    long node = g.node_index(mi);
    double rhs = blk.rhs[node];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double v = std::fabs(blk.values(x * m + i, j));
        double mg = rhs - v;
        ++r.checked;
        if (!(mg >= 0)) ++r.violations;
        if (mg < r.min_margin) {
          r.min_margin = mg;
          r.worst_node = node;
          r.worst_value = v;
          r.worst_rhs = rhs;
          r.worst_dist = blk.dist[node];
        }
      }
    if (x == blk.y_interior) {
      r.ondiag_rhs = rhs;
      for (int i = 0; i < m; ++i) r.ondiag_value = std::max(r.ondiag_value, std::fabs(blk.values(x * m + i, i)));
    }
  }
  r.pass = r.violations == 0 && r.checked > 0;
  return r;
}

double symmetry_check(const Stepper& st, double t, long y1, long y2) {
  const DiscreteForm& F = st.form();
  const int m = F.m;
  std::vector<std::pair<long, int>> s1, s2;
  for (int j = 0; j < m; ++j) {
    s1.emplace_back(y1, j);
    s2.emplace_back(y2, j);
  }
  RowMat K = kernel_columns(st, s2, {t})[0];          // k(t, ., y2)
  RowMat Ks = kernel_columns(st, s1, {t}, true)[0];   // k*(t, ., y1)
  double err = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) err = std::max(err, std::fabs(K(y1 * m + i, j) - Ks(y2 * m + j, i)));
  return err;
}

void write_kernel_csv(const std::string& path, const std::vector<KernelBlock>& blocks, const BoxDomain& g) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write " + path);
  for (int k = 0; k < g.d; ++k) std::fprintf(fp, "x%d,", k + 1);
  std::fprintf(fp, "t,y,i,j,value,distance,bound,margin\n");
  std::vector<double> x(g.d);
  for (const auto& b : blocks) {
    for (long n = 0; n < g.interior_count(); ++n) {
      long node = g.interior_to_node(n);
      g.coords(node, x.data());
      for (int i = 0; i < b.m; ++i)
        for (int j = 0; j < b.m; ++j) {
          for (double v : x) std::fprintf(fp, "%.10g,", v);
          double val = b.values(n * b.m + i, j);
          std::fprintf(fp, "%.10g,%ld,%d,%d,%.10g,%.10g,%.10g,%.10g\n", b.t, b.y_node, i, j, val, b.dist[node],
                       b.rhs[node], b.rhs[node] - std::fabs(val));
        }
    }
  }
  std::fclose(fp);
}

}  // namespace lpq
