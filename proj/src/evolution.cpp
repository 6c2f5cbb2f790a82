#include "lpq/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lpq {

Scheme parse_scheme(const std::string& s) {
  if (s == "implicit_euler" || s == "ie" || s == "euler") return Scheme::ImplicitEuler;
  if (s == "crank_nicolson" || s == "cn") return Scheme::CrankNicolson;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

const char* scheme_name(Scheme s) { return s == Scheme::ImplicitEuler ? "implicit_euler" : "crank_nicolson"; }

Stepper::Stepper(const DiscreteForm& F, Scheme scheme, double dt, int residual_every)
    : F_(&F), scheme_(scheme), dt_(dt), theta_(scheme == Scheme::ImplicitEuler ? 1.0 : 0.5), every_(residual_every) {
  if (!(dt > 0)) throw std::invalid_argument("stepper: dt must be positive");
  const long n = F.size();
  SpMat M(n, n);
  M.setIdentity();
  M *= F.vol;
  A_ = M + (theta_ * dt_) * F.S;
  if (theta_ < 1.0) B_ = M - ((1.0 - theta_) * dt_) * F.S;
  solver_.compute(A_, F.fill_order());
  if (solver_.in_order_available()) {
    Ap_ = solver_.permuted(A_);
    if (theta_ < 1.0) Bp_ = solver_.permuted(B_);
  }
}

long Stepper::steps_for(double t) const {
  if (t < 0) throw std::invalid_argument("negative time");
  return std::llround(t / dt_);
}

void Stepper::step(RowMat& X, bool transpose, bool check) const {
  RowMat R;
  if (theta_ < 1.0)
    R = transpose ? RowMat(B_.transpose() * X) : RowMat(B_ * X);
  else
    R = X * F_->vol;
  X = R;
  if (transpose)
    solver_.solve_transpose(X);
  else
    solver_.solve(X);
  if (check) {
    RowMat E = transpose ? RowMat(A_.transpose() * X) : RowMat(A_ * X);
    E -= R;
    for (long c = 0; c < X.cols(); ++c) {
      double rn = R.col(c).norm();
      if (rn > 0) maxres_ = std::max(maxres_, E.col(c).norm() / rn);
    }
  }
}

void Stepper::run(RowMat& X, long steps, bool transpose) const {
  if (steps <= 0) return;
  if (!solver_.in_order_available()) {
    for (long s = 0; s < steps; ++s) step(X, transpose, every_ > 0 && s % every_ == 0);
    return;
  }
  // stay in factor order for the whole run
  RowMat Y, R, E;
  solver_.to_order(X, Y);
  if (theta_ < 1.0) R.resize(Y.rows(), Y.cols());
  for (long s = 0; s < steps; ++s) {
    const bool check = every_ > 0 && s % every_ == 0;
    if (theta_ < 1.0) {
      if (transpose)
        R.noalias() = Bp_.transpose() * Y;
      else
        R.noalias() = Bp_ * Y;
      Y.swap(R);
    } else {
      Y *= F_->vol;
    }
    if (check) E = Y;
    if (transpose)
      solver_.solve_transpose_in_order(Y);
    else
      solver_.solve_in_order(Y);
    if (check) {
      RowMat AY = transpose ? RowMat(Ap_.transpose() * Y) : RowMat(Ap_ * Y);
      for (long c = 0; c < Y.cols(); ++c) {
        double rn = E.col(c).norm();
        if (rn > 0) maxres_ = std::max(maxres_, (AY.col(c) - E.col(c)).norm() / rn);
      }
    }
  }
  solver_.from_order(Y, X);
}

void Stepper::advance(RowMat& X, long steps) const { run(X, steps, false); }

void Stepper::advance_adjoint(RowMat& X, long steps) const { run(X, steps, true); }

double default_dt(const DiscreteForm& F) {
  double h2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < F.d; ++k) h2 = std::min(h2, F.grid.h(k) * F.grid.h(k));
  double vmax = 0.0;
  for (long i = 0; i < F.potential.outerSize(); ++i)
    for (SpMat::InnerIterator it(F.potential, i); it; ++it)
      if (it.row() == it.col()) vmax = std::max(vmax, std::fabs(it.value()) / F.vol);
  return 0.25 * std::min(h2, vmax > 0 ? 1.0 / vmax : h2);
}

RowMat to_columns(const CVec& u) {
  RowMat X(u.size(), 2);
  X.col(0) = u.real();
  X.col(1) = u.imag();
  return X;
}

CVec from_columns(const RowMat& X, int col) {
  CVec u(X.rows());
  u.real() = X.col(col);
  u.imag() = X.col(col + 1);
  return u;
}

CVec evolve(const Stepper& st, const CVec& u0, double t) {
  if (u0.size() != st.form().size()) throw std::invalid_argument("evolve: size mismatch");
  RowMat X = to_columns(u0);
  double n0 = X.norm();
  st.advance(X, st.steps_for(t));
  if (!std::isfinite(X.norm()) || X.norm() > 1e12 * std::max(n0, 1e-300))
    throw BlowUp("evolve: norm exceeded 1e12 times the initial norm");
  return from_columns(X);
}

namespace {

// log of the p-norm of each sample; samples are column pairs (re, im) or single columns
void log_pnorms(const RowMat& X, int m, double vol, bool cplx_data, const std::vector<double>& ps,
                std::vector<std::vector<double>>& out) {
  const long N = X.rows() / m;
  const int w = cplx_data ? 2 : 1;
  const long ns = X.cols() / w;
  out.assign(ps.size(), std::vector<double>(ns, 0.0));
  std::vector<double> acc(ps.size());
  for (long s = 0; s < ns; ++s) {
    std::fill(acc.begin(), acc.end(), 0.0);
    double rmax = 0.0;
    for (long x = 0; x < N; ++x) {
      double r2 = 0.0;
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < w; ++c) {
          double v = X(x * m + i, s * w + c);
          r2 += v * v;
        }
      if (r2 <= 0) continue;
      rmax = std::max(rmax, r2);
      double lr = 0.5 * std::log(r2);
      for (size_t q = 0; q < ps.size(); ++q)
        if (!std::isinf(ps[q])) acc[q] += std::exp(ps[q] * lr);
    }
    for (size_t q = 0; q < ps.size(); ++q) {
      if (std::isinf(ps[q]))
        out[q][s] = 0.5 * std::log(rmax);
      else
        out[q][s] = (std::log(acc[q]) + std::log(vol)) / ps[q];
    }
  }
}

// nodewise |y|^(p-2) y on the column pair (c, c+1)
void duality_map(RowMat& X, long c, int m, double p) {
  const long N = X.rows() / m;
  for (long x = 0; x < N; ++x) {
    double r2 = 0.0;
    for (int i = 0; i < m; ++i) r2 += X(x * m + i, c) * X(x * m + i, c) + X(x * m + i, c + 1) * X(x * m + i, c + 1);
    double f = r2 > 0 ? std::pow(r2, 0.5 * (p - 2.0)) : 0.0;
    for (int i = 0; i < m; ++i) {
      X(x * m + i, c) *= f;
      X(x * m + i, c + 1) *= f;
    }
  }
}

}  // namespace

std::vector<GrowthTrace> contractivity_probe(const Stepper& st, const std::vector<double>& ps, const ProbeConfig& cfg) {
  const DiscreteForm& F = st.form();
  const long n = F.size();
  const int w = cfg.complex_data ? 2 : 1;
  std::mt19937_64 rng(cfg.seed);
  RowMat X(n, static_cast<long>(w) * cfg.samples);
  for (int s = 0; s < cfg.samples; ++s) {
    CVec u = smooth_random_field(F.grid, F.m, cfg.kmax, rng, cfg.complex_data);
    X.col(s * w) = u.real();
    if (w == 2) X.col(s * w + 1) = u.imag();
  }
  const RowMat X0 = X;

  const long total = st.steps_for(cfg.t_final);
  const long stride = std::max<long>(1, total / std::max(1, cfg.checkpoints));
  std::vector<std::vector<double>> l0, lc;
  log_pnorms(X, F.m, F.vol, cfg.complex_data, ps, l0);

  std::vector<double> times;
  // logs[q][s][checkpoint]
  std::vector<std::vector<std::vector<double>>> logs(ps.size(), std::vector<std::vector<double>>(cfg.samples));
  long done = 0;
  while (done < total) {
    long k = std::min(stride, total - done);
    st.advance(X, k);
    done += k;
    times.push_back(done * st.dt());
    log_pnorms(X, F.m, F.vol, cfg.complex_data, ps, lc);
    for (size_t q = 0; q < ps.size(); ++q)
      for (int s = 0; s < cfg.samples; ++s) logs[q][s].push_back(lc[q][s]);
    if (!std::isfinite(X.norm())) throw BlowUp("probe: non-finite state");
  }

  std::vector<GrowthTrace> out(ps.size());
  for (size_t q = 0; q < ps.size(); ++q) {
    GrowthTrace& g = out[q];
    g.p = ps[q];
    for (int s = 0; s < cfg.samples; ++s)
      for (size_t c = 0; c < times.size(); ++c) {
        double sl = (logs[q][s][c] - l0[q][s]) / times[c];
        if (sl > g.max_slope) {
          g.max_slope = sl;
          g.worst_sample = s;
          g.worst_t = times[c];
        }
      }
    if (g.worst_sample >= 0) {
      g.t = times;
      for (size_t c = 0; c < times.size(); ++c) {
        g.norm.push_back(std::exp(logs[q][g.worst_sample][c]));
        g.slope.push_back((logs[q][g.worst_sample][c] - l0[q][g.worst_sample]) / times[c]);
      }
    }
  }

  // dual power iteration from the worst samples, batched over p
  std::vector<size_t> fin;
  for (size_t q = 0; q < ps.size(); ++q)
    if (!std::isinf(ps[q]) && ps[q] > 1.0 && out[q].worst_sample >= 0) fin.push_back(q);
  const long rsteps = std::max<long>(1, st.steps_for(std::min(cfg.refine_horizon, cfg.t_final)));
  if (cfg.refine_iters > 0 && !fin.empty()) {
    const double tau = rsteps * st.dt();
    RowMat Y(n, 2 * static_cast<long>(fin.size()));
    for (size_t j = 0; j < fin.size(); ++j) {
      long s = out[fin[j]].worst_sample;
      Y.col(2 * j) = X0.col(s * w);
      Y.col(2 * j + 1) = w == 2 ? Eigen::VectorXd(X0.col(s * w + 1)) : Eigen::VectorXd::Zero(n);
    }
    std::vector<double> pf;
    for (size_t q : fin) pf.push_back(ps[q]);
    for (int it = 0; it <= cfg.refine_iters; ++it) {
      std::vector<std::vector<double>> a, b;
      RowMat Z = Y;
      st.advance(Z, rsteps);
      // p-norm of pair j uses exponent pf[j]; evaluate all exponents and pick the diagonal
      log_pnorms(Y, F.m, F.vol, true, pf, a);
      log_pnorms(Z, F.m, F.vol, true, pf, b);
      for (size_t j = 0; j < fin.size(); ++j) {
        double sl = (b[j][j] - a[j][j]) / tau;
        out[fin[j]].refined_slope = std::max(out[fin[j]].refined_slope, sl);
      }
      if (it == cfg.refine_iters) break;
      for (size_t j = 0; j < fin.size(); ++j) duality_map(Z, 2 * j, F.m, pf[j]);
      st.advance_adjoint(Z, rsteps);
      for (size_t j = 0; j < fin.size(); ++j) {
        double pp = pf[j] / (pf[j] - 1.0);
        duality_map(Z, 2 * j, F.m, pp);
      }
      // rescale to keep magnitudes moderate
      for (long c = 0; c < Z.cols(); c += 2) {
        double nn = std::sqrt(Z.col(c).squaredNorm() + Z.col(c + 1).squaredNorm());
        if (nn > 0) Z.middleCols(c, 2) /= nn;
      }
      Y = Z;
    }
  }
  return out;
}

double adjoint_duality_check(const Stepper& st, const Stepper* adj, double t, const CVec& f, const CVec& g) {
  const double vol = st.form().vol;
  long k = st.steps_for(t);
  RowMat Tf = to_columns(f);
  st.advance(Tf, k);
  RowMat Tg = to_columns(g);
  if (adj)
    adj->advance(Tg, adj->steps_for(t));
  else
    st.advance_adjoint(Tg, k);
  cplx lhs = vol * g.dot(from_columns(Tf));
  cplx rhs = vol * from_columns(Tg).dot(f);
  return std::abs(lhs - rhs);
}

void write_growth_csv(const std::string& path, const std::vector<GrowthTrace>& traces) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write " + path);
  std::fprintf(fp, "p,t,norm,slope,bound\n");
  for (const auto& g : traces)
    for (size_t i = 0; i < g.t.size(); ++i)
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.p, g.t[i], g.norm[i], g.slope[i], g.bound);
  std::fclose(fp);
}

}  // namespace lpq
