#include "lpq/hypotheses.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "lpq/interval.hpp"

namespace lpq {

HypMode HypMode::fixed(double gamma, double Cgamma) {
  HypMode m;
  m.kind = Kind::Fixed;
  m.gamma = gamma;
  m.Cgamma = Cgamma;
  return m;
}

HypMode HypMode::refined(double a, double b) {
  HypMode m;
  m.kind = Kind::Refined;
  m.a = a;
  m.b = b;
  return m;
}

HypMode HypMode::kernel(double beta, double c) {
  HypMode m;
  m.kind = Kind::Kernel;
  m.beta = beta;
  m.c = c;
  return m;
}

const char* HypMode::name() const {
  switch (kind) {
    case Kind::Fixed: return "fixed_gamma";
    case Kind::Refined: return "refined";
    case Kind::Kernel: return "kernel";
  }
  return "?";
}

double HypMode::R(double g) const {
  switch (kind) {
    case Kind::Fixed: return Cgamma;
    case Kind::Refined: return phi_power(a, b, g);
    case Kind::Kernel: return beta == 0.0 ? c : c * std::pow(g, -beta);
  }
  return 0.0;
}

bool HypothesisReport::pass() const {
  for (const auto& [k, v] : flags)
    if (!v) return false;
  return true;
}

namespace {

Witness make_witness(const BoxDomain& g, long node, double value) {
  Witness w;
  w.node = node;
  w.value = value;
  if (node >= 0) {
    w.x.resize(g.d);
    g.coords(node, w.x.data());
  }
  return w;
}

double sigma_max(const Mat& X) {
  if (X.size() == 0) return 0.0;
  if (X.rows() <= X.cols()) return std::sqrt(std::max(0.0, sym_max_eig(X * X.transpose())));
  return std::sqrt(std::max(0.0, sym_max_eig(X.transpose() * X)));
}

// kron(Qis, I_m)
Mat kron_I(const Mat& Qis, int m) {
  int d = static_cast<int>(Qis.rows());
  Mat K = Mat::Zero(d * m, d * m);
  for (int h = 0; h < d; ++h)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < m; ++i) K(h * m + i, k * m + i) = Qis(h, k);
  return K;
}

}  // namespace

double estimate_v0(const SampledField& V, Witness* worst) {
  double v0 = kInf;
  long at = -1;
  for (std::size_t i = 0; i < V.values.size(); ++i) {
    double l = sym_min_eig(0.5 * (V.values[i] + V.values[i].transpose()));
    if (l < v0) {
      v0 = l;
      at = static_cast<long>(i);
    }
  }
  if (worst) {
    worst->node = at;
    worst->value = v0;
  }
  return v0;
}

double estimate_c0(const SampledField& V, Witness* worst) {
  double c0 = 0;
  long at = -1;
  for (std::size_t i = 0; i < V.values.size(); ++i) {
    const Mat& v = V.values[i];
    Mat Vs = 0.5 * (v + v.transpose());
    Mat Va = 0.5 * (v - v.transpose());
    if (Va.cwiseAbs().maxCoeff() == 0.0) {
      if (sym_min_eig(Vs) <= 0) throw DomainError("V_S not positive definite at node " + std::to_string(i));
      continue;
    }
    Mat S = inv_sqrt_spd(Vs);
    double c = sigma_max(S * Va * S);
    if (c > c0) {
      c0 = c;
      at = static_cast<long>(i);
    }
  }
  if (worst) {
    worst->node = at;
    worst->value = c0;
  }
  return c0;
}

KappaA estimate_kappa_A(const SampledSystem& s) {
  KappaA out;
  out.re_min = 0.0;
  if (!s.hasA) return out;
  int d = s.d, m = s.m;
  long N = s.grid.node_count();
  out.re_min = kInf;
  for (long n = 0; n < N; ++n) {
    Mat K = kron_I(inv_sqrt_spd(s.Q.values[n]), m);
    Mat Ab(d * m, d * m);
    for (int h = 0; h < d; ++h)
      for (int k = 0; k < d; ++k) Ab.block(h * m, k * m, m, m) = s.A[h][k].values[n];
    Mat At = K * Ab * K;
    Mat S = 0.5 * (At + At.transpose());
    Mat Aa = 0.5 * (At - At.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    double lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(d * m - 1);
    double k = std::max(lmax, sigma_max(Aa));
    if (k > out.kA) {
      out.kA = k;
      out.worst = make_witness(s.grid, n, k);
    }
    if (lmin < out.re_min) {
      out.re_min = lmin;
      out.worst_re = make_witness(s.grid, n, lmin);
      Eigen::VectorXd th = K * es.eigenvectors().col(0);
      out.witness_theta.assign(th.data(), th.data() + th.size());
    }
  }
  return out;
}

DriftTables drift_tables(const SampledSystem& s) {
  DriftTables t;
  int d = s.d, m = s.m;
  t.m = m;
  t.hasB = s.hasB;
  t.hasC = s.hasC;
  t.hasW = s.hasW;
  long N = s.grid.node_count();
  t.nodes.resize(N);
  for (long n = 0; n < N; ++n) {
    NodeDrift& nd = t.nodes[n];
    Mat Vs = 0.5 * (s.V.values[n] + s.V.values[n].transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(Vs);
    nd.lam = es.eigenvalues();
    const Mat& U = es.eigenvectors();
    Mat K;
    if (s.hasB || s.hasC) K = kron_I(inv_sqrt_spd(s.Q.values[n]), m);
    if (s.hasB) {
      Mat Bb(m, d * m);
      for (int h = 0; h < d; ++h) Bb.block(0, h * m, m, m) = s.B[h].values[n];
      nd.Bw = U.transpose() * Bb * K;
    }
    if (s.hasC) {
      Mat Cb(d * m, m);
      for (int h = 0; h < d; ++h) Cb.block(h * m, 0, m, m) = s.C[h].values[n];
      nd.Cw = K * Cb * U;
    }
    if (s.hasW) nd.Ww = U.transpose() * s.W.values[n] * U;
  }
  return t;
}

DriftEstimate drift_at(const DriftTables& t, const BoxDomain& grid, double gamma, double R) {
  DriftEstimate e;
  e.gB = e.gC = e.gW = gamma;
  long N = static_cast<long>(t.nodes.size());
  for (long n = 0; n < N; ++n) {
    const NodeDrift& nd = t.nodes[n];
    Eigen::VectorXd w(t.m);
    for (int i = 0; i < t.m; ++i) {
      double p = gamma * nd.lam(i) + R;
      if (!(p > 0)) throw DomainError("whitening matrix not positive definite at node " + std::to_string(n));
      w(i) = 1.0 / std::sqrt(p);
    }
    if (t.hasB) {
      double v = sigma_max(w.asDiagonal() * nd.Bw);
      if (v > e.kB) {
        e.kB = v;
        e.wB = make_witness(grid, n, v);
      }
    }
    if (t.hasC) {
      double v = sigma_max(nd.Cw * w.asDiagonal());
      if (v > e.kC) {
        e.kC = v;
        e.wC = make_witness(grid, n, v);
      }
    }
    if (t.hasW) {
      double v = sigma_max(w.asDiagonal() * nd.Ww * w.asDiagonal());
      if (v > e.kW) {
        e.kW = v;
        e.wW = make_witness(grid, n, v);
      }
    }
  }
  return e;
}

namespace {

// sup over gamma > 0 of one component of drift_at
void sup_over_gamma(const DriftTables& t, const BoxDomain& grid, const HypMode& mode, int which,
                    double& best, double& best_g, Witness& best_w) {
  auto F = [&](double g) {
    DriftEstimate e = drift_at(t, grid, g, mode.R(g));
    if (which == 0) return std::make_pair(e.kB, e.wB);
    if (which == 1) return std::make_pair(e.kC, e.wC);
    return std::make_pair(e.kW, e.wW);
  };
  const int n = 121;
  std::vector<double> lg(n), val(n);
  best = -1;
  int ib = 0;
  for (int i = 0; i < n; ++i) {
    lg[i] = -6.0 + 12.0 * i / (n - 1);
    auto [v, w] = F(std::pow(10.0, lg[i]));
    val[i] = v;
    if (v > best) {
      best = v;
      ib = i;
      best_g = std::pow(10.0, lg[i]);
      best_w = w;
    }
  }
  double a = lg[std::max(ib - 1, 0)], b = lg[std::min(ib + 1, n - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = F(std::pow(10.0, x1)).first, f2 = F(std::pow(10.0, x2)).first;
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = F(std::pow(10.0, x1)).first;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = F(std::pow(10.0, x2)).first;
    }
  }
  double xm = 0.5 * (a + b);
  auto [vm, wm] = F(std::pow(10.0, xm));
  if (vm > best) {
    best = vm;
    best_g = std::pow(10.0, xm);
    best_w = wm;
  }
  if (mode.kind == HypMode::Kind::Kernel && mode.beta == 0.0) {
    auto [v0, w0] = F(0.0);
    if (v0 >= best) {
      best = v0;
      best_g = 0.0;
      best_w = w0;
    }
  }
}

}  // namespace

DriftEstimate estimate_drift_constants(const DriftTables& t, const BoxDomain& grid, const HypMode& mode) {
  if (mode.kind == HypMode::Kind::Fixed) return drift_at(t, grid, mode.gamma, mode.Cgamma);
  DriftEstimate e;
  if (t.hasB) sup_over_gamma(t, grid, mode, 0, e.kB, e.gB, e.wB);
  if (t.hasC) sup_over_gamma(t, grid, mode, 1, e.kC, e.gC, e.wC);
  if (t.hasW && mode.kind == HypMode::Kind::Refined) sup_over_gamma(t, grid, mode, 2, e.kW, e.gW, e.wW);
  e.kB = std::max(e.kB, 0.0);
  e.kC = std::max(e.kC, 0.0);
  e.kW = std::max(e.kW, 0.0);
  return e;
}

DriftEstimate estimate_drift_constants(const SampledSystem& s, const HypMode& mode) {
  return estimate_drift_constants(drift_tables(s), s.grid, mode);
}

HypothesisReport check_all(const SampledSystem& s, const HypMode& mode) {
  HypothesisReport r;
  r.mode = mode;
  r.nodes = s.grid.node_count();
  const BoxDomain& g = s.grid;

  std::vector<double> lq = min_eigen_field(s.Q);
  long iq = 0;
  r.lambdaQ_min = kInf;
  for (std::size_t i = 0; i < lq.size(); ++i)
    if (lq[i] < r.lambdaQ_min) {
      r.lambdaQ_min = lq[i];
      iq = static_cast<long>(i);
    }
  r.worst["lambdaQ"] = make_witness(g, iq, r.lambdaQ_min);
  r.flags["Q_positive"] = r.lambdaQ_min > 0;

  Witness wv;
  r.v0 = estimate_v0(s.V, &wv);
  r.worst["v0"] = make_witness(g, wv.node, r.v0);
  r.flags["V_coercive"] = r.v0 > 0;
  if (!(r.v0 > 0) || !(r.lambdaQ_min > 0)) {
    // whitening impossible; report what we have
    r.flags["constants_finite"] = false;
    return r;
  }
  Witness wc;
  r.c0 = estimate_c0(s.V, &wc);
  r.worst["c0"] = make_witness(g, wc.node, r.c0);

  KappaA ka = estimate_kappa_A(s);
  r.kA = ka.kA;
  r.A_re_min = ka.re_min;
  r.worst["kappaA"] = ka.worst;
  if (s.hasA) r.worst["A_re_min"] = ka.worst_re;
  r.flags["A_nonnegative"] = ka.re_min >= -1e-12;
  if (ka.re_min < -1e-12) r.A_witness = ka.witness_theta;

  DriftTables t = drift_tables(s);
  DriftEstimate de = estimate_drift_constants(t, g, mode);
  r.kB = de.kB;
  r.kC = de.kC;
  r.kW = de.kW;
  r.gamma_sup_B = de.gB;
  r.gamma_sup_C = de.gC;
  r.gamma_sup_W = de.gW;
  if (s.hasB) r.worst["kappaB"] = de.wB;
  if (s.hasC) r.worst["kappaC"] = de.wC;
  if (s.hasW) r.worst["kappaW"] = de.wW;
  r.flags["constants_finite"] = std::isfinite(r.c0) && std::isfinite(r.kA) && std::isfinite(r.kB) &&
                                std::isfinite(r.kC) && std::isfinite(r.kW);

  switch (mode.kind) {
    case HypMode::Kind::Fixed: {
      r.gamma = mode.gamma;
      r.Cgamma = mode.Cgamma;
      r.K = K_value(r.kB, r.kC, r.kW, r.gamma);
      r.flags["K_positive"] = r.K > 0;
      r.best_K = -kInf;
      for (int i = 0; i < 200; ++i) {
        double gg = std::pow(10.0, -4.0 + 8.0 * i / 199.0);
        DriftEstimate e = drift_at(t, g, gg, mode.Cgamma);
        double K = K_value(e.kB, e.kC, e.kW, gg);
        if (K > r.best_K) {
          r.best_K = K;
          r.best_gamma = gg;
        }
      }
      break;
    }
    case HypMode::Kind::Refined: {
      r.flags["refined_params"] = mode.a > 0 && mode.a < 0.5 && mode.b >= 0 && mode.b < 1;
      break;
    }
    case HypMode::Kind::Kernel: {
      r.beta = mode.beta;
      r.c = mode.c;
      r.kappa = std::max(r.kB, r.kC);
      r.nu0 = r.lambdaQ_min;
      r.flags["nu0_positive"] = r.nu0 > 0;
      r.flags["A_W_vanish"] = !s.hasA && !s.hasW;
      r.flags["c_at_least_one"] = mode.c >= 1.0;
      r.flags["beta_nonnegative"] = mode.beta >= 0.0;
      break;
    }
  }
  return r;
}

ProbeResult random_probe(const SampledSystem& s, double gamma, double R, const HypothesisReport& rep,
                         int pairs_per_node, unsigned long seed, long max_nodes) {
  using C = std::complex<double>;
  using CV = Eigen::VectorXcd;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto rv = [&](int n) {
    CV v(n);
    for (int i = 0; i < n; ++i) v(i) = C(nd(rng), nd(rng));
    return v;
  };
  ProbeResult pr;
  pr.slack_B = pr.slack_C = pr.slack_W = pr.slack_A = pr.slack_c0 = kInf;
  int d = s.d, m = s.m;
  long N = s.grid.node_count();
  long step = (max_nodes > 0 && N > max_nodes) ? N / max_nodes : 1;
  for (long n = 0; n < N; n += step) {
    Mat Qk = kron_I(s.Q.values[n], m);
    Mat Vs = 0.5 * (s.V.values[n] + s.V.values[n].transpose());
    Mat P = gamma * Vs + R * Mat::Identity(m, m);
    for (int k = 0; k < pairs_per_node; ++k) {
      CV th = rv(d * m), eta = rv(m), xi = rv(m);
      double q = std::real(th.dot(Qk.cast<C>() * th));
      double pe = std::real(eta.dot(P.cast<C>() * eta));
      double px = std::real(xi.dot(P.cast<C>() * xi));
      double sc = std::sqrt(q * pe);
      if (s.hasB) {
        C lhs = 0;
        for (int h = 0; h < d; ++h) lhs += eta.dot(s.B[h].values[n].cast<C>() * th.segment(h * m, m));
        pr.slack_B = std::min(pr.slack_B, (rep.kB * sc - std::abs(lhs)) / sc);
      }
      if (s.hasC) {
        C lhs = 0;
        for (int h = 0; h < d; ++h) lhs += th.segment(h * m, m).dot(s.C[h].values[n].cast<C>() * eta);
        pr.slack_C = std::min(pr.slack_C, (rep.kC * sc - std::abs(lhs)) / sc);
      }
      if (s.hasW) {
        C lhs = eta.dot(s.W.values[n].cast<C>() * xi);
        double sw = std::sqrt(px * pe);
        pr.slack_W = std::min(pr.slack_W, (rep.kW * sw - std::abs(lhs)) / sw);
      }
      if (s.hasA) {
        C form = 0;
        for (int h = 0; h < d; ++h)
          for (int kk = 0; kk < d; ++kk)
            form += th.segment(h * m, m).dot(s.A[h][kk].values[n].cast<C>() * th.segment(kk * m, m));
        double sl = std::min(rep.kA * q - form.real(), rep.kA * q - std::abs(form.imag())) / q;
        sl = std::min(sl, form.real() / q + 1e-12);
        pr.slack_A = std::min(pr.slack_A, sl);
      }
      C vf = xi.dot(s.V.values[n].cast<C>() * xi);
      pr.slack_c0 = std::min(pr.slack_c0, (rep.c0 * vf.real() - std::abs(vf.imag())) / vf.real());
    }
  }
  return pr;
}

}  // namespace lpq
