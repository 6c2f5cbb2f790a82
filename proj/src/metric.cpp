#include "lpq/metric.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace lpq {

MetricField weight_field(const SampledField& V, const SampledField& Q, const BoxDomain& grid, double beta) {
  if (beta < 0) throw std::invalid_argument("weight_field: beta must be nonnegative");
  MetricField f;
  f.grid = grid;
  f.beta = beta;
  const long nn = grid.node_count();
  f.w.resize(nn);
  f.Qinv.resize(nn);
  const double e = beta / (beta + 1.0);
  for (long i = 0; i < nn; ++i) {
    if (beta == 0) {
      f.w[i] = 1.0;
    } else {
      const Mat& v = V.values[i];
      double lam = sym_min_eig(0.5 * (v + v.transpose()));
      if (!(lam > 0)) throw std::domain_error("weight_field: lambda_V not positive at node " + std::to_string(i));
      f.w[i] = std::pow(lam, e);
    }
    Eigen::LLT<Mat> llt(Q.values[i]);
    if (llt.info() != Eigen::Success) throw std::domain_error("weight_field: Q not positive definite at node " + std::to_string(i));
    f.Qinv[i] = llt.solve(Mat::Identity(Q.rows, Q.rows));
  }
  return f;
}

std::vector<std::vector<int>> stencil_moves(int d, int stencil) {
  int level = stencil == 4 ? 1 : stencil == 8 ? 2 : stencil == 16 ? 3 : 0;
  if (level == 0) throw std::invalid_argument("stencil must be 4, 8 or 16");
  int span = level == 3 ? 2 : 1;
  std::vector<std::vector<int>> moves;
  std::vector<int> v(d, -span);
  for (;;) {
    int nz = 0, g = 0;
    for (int k = 0; k < d; ++k)
      if (v[k] != 0) {
        ++nz;
        g = std::gcd(g, std::abs(v[k]));
      }
    bool ok = nz > 0 && g == 1 && (level > 1 || nz == 1);
    if (ok) moves.push_back(v);
    int k = 0;
    while (k < d) {
      if (++v[k] <= span) break;
      v[k] = -span;
      ++k;
    }
    if (k == d) break;
  }
  return moves;
}

DistanceMap distance_map(const MetricField& f, long source, int stencil) {
  const BoxDomain& g = f.grid;
  const int d = g.d;
  const long nn = g.node_count();
  if (source < 0 || source >= nn) throw std::invalid_argument("distance_map: source off grid");
  auto moves = stencil_moves(d, stencil);
  const size_t nm = moves.size();

  std::vector<long> stride(d, 1);
  for (int k = 1; k < d; ++k) stride[k] = stride[k - 1] * (g.n[k - 1] + 1);
  std::vector<double> len(nm);
  std::vector<long> shift(nm, 0);
  std::vector<Eigen::VectorXd> unit(nm);
  for (size_t j = 0; j < nm; ++j) {
    Eigen::VectorXd e(d);
    for (int k = 0; k < d; ++k) {
      e(k) = moves[j][k] * g.h(k);
      shift[j] += moves[j][k] * stride[k];
    }
    len[j] = e.norm();
    unit[j] = e / len[j];
  }
  // local speed sqrt(w (Q^{-1} e, e)) per node and move
  std::vector<double> speed(static_cast<size_t>(nn) * nm);
  for (long i = 0; i < nn; ++i)
    for (size_t j = 0; j < nm; ++j)
      speed[i * nm + j] = std::sqrt(f.w[i] * unit[j].dot(f.Qinv[i] * unit[j]));

  DistanceMap out;
  out.source = source;
  out.stencil = stencil;
  out.dist.assign(nn, std::numeric_limits<double>::infinity());
  std::vector<char> done(nn, 0);
  using Item = std::pair<double, long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  out.dist[source] = 0.0;
  pq.emplace(0.0, source);
  std::vector<int> mi(d);
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    long r = u;
    for (int k = 0; k < d; ++k) {
      mi[k] = static_cast<int>(r % (g.n[k] + 1));
      r /= g.n[k] + 1;
    }
    for (size_t j = 0; j < nm; ++j) {
      bool inside = true;
      for (int k = 0; k < d && inside; ++k) {
        int t = mi[k] + moves[j][k];
        inside = t >= 0 && t <= g.n[k];
      }
      if (!inside) continue;
      long v = u + shift[j];
      if (done[v]) continue;
      // trapezoid rule for the length integral along the segment
      double c = len[j] * 0.5 * (speed[u * nm + j] + speed[v * nm + j]);
      double nd = du + c;
      if (nd < out.dist[v]) {
        out.dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return out;
}

Equivalence euclid_equivalence_check(const MetricField& f, const SampledField& Q, double floor) {
  Equivalence e;
  e.q0 = std::numeric_limits<double>::infinity();
  e.q1 = 0.0;
  for (size_t i = 0; i < f.w.size(); ++i) {
    e.q0 = std::min(e.q0, sym_min_eig(Q.values[i]) / f.w[i]);
    e.q1 = std::max(e.q1, sym_max_eig(Q.values[i]) / f.w[i]);
  }
  e.equivalent = std::isfinite(e.q0) && std::isfinite(e.q1) && e.q0 > floor && e.q1 < 1.0 / floor;
  return e;
}

void write_distance_csv(const std::string& path, const DistanceMap& m, const BoxDomain& g) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write " + path);
  for (int k = 0; k < g.d; ++k) std::fprintf(fp, "x%d,", k + 1);
  std::fprintf(fp, "distance\n");
  std::vector<double> x(g.d);
  for (long i = 0; i < g.node_count(); ++i) {
    g.coords(i, x.data());
    for (double v : x) std::fprintf(fp, "%.17g,", v);
    std::fprintf(fp, "%.17g\n", m.dist[i]);
  }
  std::fclose(fp);
}

}  // namespace lpq
