#include "lpq/interval.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lpq {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

bool IntervalSpec::contains(double p) const {
  switch (kind) {
    case Kind::AllP: return p > 1.0;
    case Kind::LeftClosed: return p >= lo && p < hi;
    case Kind::RightClosed: return p > lo && p <= hi;
    case Kind::Closed: return p >= lo && p <= hi;
    case Kind::Open: return p > lo && p < hi;
  }
  return false;
}

double IntervalSpec::midpoint() const {
  if (std::isinf(hi)) return std::max(2.0, 2.0 * lo);
  return 0.5 * (lo + hi);
}

std::string IntervalSpec::str() const {
  bool lc = kind == Kind::LeftClosed || kind == Kind::Closed;
  bool rc = kind == Kind::RightClosed || kind == Kind::Closed;
  return std::string(lc ? "[" : "]") + fmt(lo) + ", " + fmt(hi) + (rc ? "]" : "[");
}

const char* IntervalSpec::kind_name(Kind k) {
  switch (k) {
    case Kind::AllP: return "all_p";
    case Kind::LeftClosed: return "left_closed";
    case Kind::RightClosed: return "right_closed";
    case Kind::Closed: return "closed";
    case Kind::Open: return "open";
  }
  return "?";
}

double K_value(double kB, double kC, double kW, double gamma) {
  return 4.0 * (1.0 / gamma - kW) - (kB + kC) * (kB + kC);
}

double delta1(double kA, double kB, double kC, double K) {
  double t = kA * (kB + kC) + kB;
  return K / ((kA * kA + 1.0) * K + t * t);
}

double delta2(double kA, double kB, double kC, double K) {
  double t = kA * (kB + kC) + kC;
  return K / (kA * kA * K + t * t);
}

IntervalSpec admissible_interval(double kA, double kB, double kC, double kW, double gamma) {
  if (kA < 0 || kB < 0 || kC < 0 || kW < 0 || !(gamma > 0))
    throw std::invalid_argument("interval: constants must be nonnegative and gamma positive");
  if (gamma * kW >= 1.0) throw HypothesisViolation("interval: gamma * kappa_W must be below 1");
  double K = K_value(kB, kC, kW, gamma);
  if (!(K > 0)) throw HypothesisViolation("interval: K must be positive");
  IntervalSpec s;
  if (kA == 0 && kB == 0 && kC == 0) {
    s.kind = IntervalSpec::Kind::AllP;
    s.lo = 1.0;
    s.hi = kInf;
  } else if (kA == 0 && kC == 0) {
    s.kind = IntervalSpec::Kind::LeftClosed;
    s.lo = 1.0 + gamma * kB * kB / (4.0 * (1.0 - gamma * kW));
    s.hi = kInf;
  } else if (kA == 0 && kB == 0) {
    s.kind = IntervalSpec::Kind::RightClosed;
    s.lo = 1.0;
    s.hi = 1.0 + 4.0 * (1.0 - gamma * kW) / (gamma * kC * kC);
  } else {
    s.kind = IntervalSpec::Kind::Closed;
    s.lo = 2.0 - delta1(kA, kB, kC, K);
    s.hi = 2.0 + delta2(kA, kB, kC, K);
  }
  return s;
}

Eigen::Matrix3d M_gamma(double kA, double kB, double kC, double kW, double gamma, double p) {
  double s = p - 2.0;
  Eigen::Matrix3d M;
  M << 1.0, -s * kA, -0.5 * (kB + kC),
       -s * kA, s, -0.5 * s * kC,
       -0.5 * (kB + kC), -0.5 * s * kC, 1.0 / gamma - kW;
  return M;
}

bool mgamma_admissible(double kA, double kB, double kC, double kW, double gamma, double p) {
  if (p < 2.0) {
    double pd = p / (p - 1.0);
    std::swap(kB, kC);
    p = pd;
  }
  Eigen::Matrix3d M = M_gamma(kA, kB, kC, kW, gamma, p);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(M, Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return es.eigenvalues()(0) >= -1e-12 * scale;
}

std::vector<char> psd_sweep_Mgamma(double kA, double kB, double kC, double kW, double gamma,
                                   const std::vector<double>& p_grid) {
  std::vector<char> out(p_grid.size());
  for (std::size_t i = 0; i < p_grid.size(); ++i)
    out[i] = mgamma_admissible(kA, kB, kC, kW, gamma, p_grid[i]) ? 1 : 0;
  return out;
}

SweepBounds sweep_bounds(const std::vector<double>& p_grid, const std::vector<char>& admissible) {
  SweepBounds b;
  long first = -1, last = -1;
  for (std::size_t i = 0; i < p_grid.size(); ++i)
    if (admissible[i]) {
      if (first < 0) first = static_cast<long>(i);
      last = static_cast<long>(i);
    }
  if (first < 0) return b;
  b.lo = p_grid[first];
  b.hi = p_grid[last];
  for (long i = first; i <= last; ++i) b.contiguous = b.contiguous && admissible[i];
  return b;
}

bool sweep_agrees(const IntervalSpec& s, const std::vector<double>& p_grid, const std::vector<char>& admissible,
                  double step) {
  SweepBounds b = sweep_bounds(p_grid, admissible);
  if (!b.contiguous || b.lo > b.hi) return false;
  double lo = std::max(s.lo, p_grid.front());
  double hi = std::min(s.hi, p_grid.back());
  const double slack = step * (1.0 + 1e-9);
  return std::fabs(b.lo - lo) <= slack && std::fabs(b.hi - hi) <= slack;
}

std::vector<double> default_p_grid(double lo, double hi, double step) {
  std::vector<double> g;
  long n = std::lround((hi - lo) / step);
  g.reserve(n + 1);
  for (long i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

std::pair<double, double> refined_p_range(double kA) {
  if (kA == 0) return {1.0, kInf};
  return {1.0 + 2.0 * kA / (2.0 * kA + 1.0), 2.0 + 1.0 / (2.0 * kA)};
}

double gamma_p(double kA, double kB, double kC, double kW, double p) {
  auto [lo, hi] = refined_p_range(kA);
  if (!(p > lo && p < hi)) throw std::domain_error("gamma_p: p outside the admissible range");
  double pm = p - 1.0;
  double den = std::min(pm * pm, 1.0) - 2.0 * kA * std::min(pm, 1.0) * std::fabs(p - 2.0);
  if (!(den > 0)) throw std::domain_error("gamma_p: non-positive denominator");
  double num = kB + pm * kC;
  double inv = kW + num * num / (4.0 * den);
  return 1.0 / inv;
}

double Egamma_value(double kA, double kB, double kC, double kW, double gamma, double p, double x, double y) {
  if (p < 2.0) {
    p = p / (p - 1.0);
    std::swap(kB, kC);
  }
  return (1.0 + 2.0 * kA * (2.0 - p)) * x * x - (kB + (p - 1.0) * kC) * x * y + (1.0 / gamma - kW) * y * y;
}

bool psd_check_Egamma(double kA, double kB, double kC, double kW, double gamma, double p) {
  if (p < 2.0) {
    p = p / (p - 1.0);
    std::swap(kB, kC);
  }
  double a = 1.0 + 2.0 * kA * (2.0 - p);
  double b = kB + (p - 1.0) * kC;
  double c = 1.0 / gamma - kW;
  if (!(a > 0)) return false;
  double scale = b * b + 4.0 * a * std::fabs(c) + 1e-300;
  if (c < -1e-12 * (1.0 / gamma + kW)) return false;
  return b * b - 4.0 * a * c <= 1e-12 * scale;
}

double phi_a(double a, double gamma) {
  if (a <= 0.0 || a >= 0.5) throw std::domain_error("phi_a: a must lie in ]0, 1/2[");
  return (1.0 - 2.0 * a) * std::pow(2.0 * a, 2.0 * a / (1.0 - 2.0 * a)) *
         std::pow(gamma, 2.0 * a / (2.0 * a - 1.0));
}

double phi_b(double b, double gamma) {
  if (b < 0.0 || b >= 1.0) throw std::domain_error("phi_b: b must lie in [0, 1[");
  if (b == 0.0) return 1.0;
  return (1.0 - b) * std::pow(b, b / (1.0 - b)) * std::pow(gamma, b / (b - 1.0));
}

double phi_power(double a, double b, double gamma) { return std::max(phi_a(a, gamma), phi_b(b, gamma)); }

double growth_exponent(const std::function<double(double)>& phi, double gp) { return phi(gp) / gp; }

double growth_prefactor(double a) {
  return (1.0 - 2.0 * a) * std::pow(2.0 * a, 2.0 * a / (1.0 - 2.0 * a));
}

double growth_exponent_b2a(double a, double kappa, double kW, int d, double kA, double p) {
  auto [lo, hi] = refined_p_range(kA);
  if (!(p > lo && p < hi)) throw std::domain_error("growth exponent: p outside the admissible range");
  double pm = p - 1.0;
  double den = std::min(pm * pm, 1.0) - 2.0 * kA * std::min(pm, 1.0) * std::fabs(p - 2.0);
  double inner = kW + p * p * kappa * kappa * d / (4.0 * den);
  return growth_prefactor(a) * std::pow(inner, 1.0 / (1.0 - 2.0 * a));
}

Tau tau_constants(double kappa, double c, double beta, double p, double sigma) {
  double s = std::fabs(sigma);
  double base = (4.0 * (s * s + 2.0 * kappa * s) + p * p * (s + kappa) * (s + kappa)) / 4.0;
  double hbase = s * s + 2.0 * kappa * s + 0.5 * p * p * (s + kappa) * (s + kappa);
  return {c * std::pow(base, beta + 1.0), c * std::pow(hbase, beta + 1.0)};
}

double Hhat(double kappa, double c, double beta) {
  return std::pow(2.0, 2.0 * beta + 1.0) * c * std::max(1.0, std::pow(kappa, 2.0 * beta + 2.0));
}

double moser_p(double r, int j) { return 2.0 * std::pow(r / (r - 1.0), j); }

double moser_t(double r, double beta, int j) {
  double R = r / (r - 1.0);
  double q = (std::pow(R, 2.0 * beta + 1.0) + 1.0) * R;
  return (q - 1.0) / q * std::pow(q, -j);
}

double moser_sum_t(double r, double beta, int jmax) {
  double s = 0;
  for (int j = jmax; j >= 0; --j) s += moser_t(r, beta, j);
  return s;
}

double moser_sum_inv_p(double r, int jmax) {
  double s = 0;
  for (int j = jmax; j >= 0; --j) s += 1.0 / moser_p(r, j);
  return s;
}

double moser_L_direct(double r, double beta, int jmax) {
  double s = 0;
  for (int j = jmax; j >= 0; --j) s += std::pow(moser_p(r, j), 2.0 * beta + 2.0) * moser_t(r, beta, j);
  return s;
}

// log B = sum_j -log(t_j)/(2 p_j) with log t_j = log((q-1)/q) - j log q and
// p_j = 2 R^j, summed as geometric series
double moser_B_closed(double r, double beta) {
  double R = r / (r - 1.0);
  double q = (std::pow(R, 2.0 * beta + 1.0) + 1.0) * R;
  double s0 = R / (R - 1.0);                 // sum R^-j
  double s1 = R / ((R - 1.0) * (R - 1.0));   // sum j R^-j
  double logB = -(std::log((q - 1.0) / q) * s0 - std::log(q) * s1) / 4.0;
  return std::exp(logB);
}

MoserSums moser_sums(double r, double beta) {
  MoserSums m;
  m.r = r;
  m.R = r / (r - 1.0);
  double Rb = std::pow(m.R, 2.0 * beta + 1.0);
  m.q = (Rb + 1.0) * m.R;
  double R2 = m.R * m.R * (Rb + 1.0);
  m.A = (R2 - m.R) / (2.0 * (R2 - 1.0));
  m.L = std::pow(2.0, 2.0 * beta + 2.0) / m.R * ((Rb + 1.0) * m.R - 1.0);
  double logB = 0.0;
  int j = 0;
  for (;; ++j) {
    double term = -std::log(moser_t(r, beta, j)) / (2.0 * moser_p(r, j));
    logB += term;
    // remaining terms decay at least geometrically with ratio 1/R (up to a factor j)
    double tail = term * (1.0 / (m.R - 1.0)) * 2.0;
    if (j > 2 && tail < 1e-14) break;
    if (j > 5000) break;
  }
  m.B = std::exp(logB);
  m.B_terms = j + 1;
  return m;
}

double sobolev_constant(int d) {
  if (d == 1) return 1.0;
  if (d == 2) return std::cbrt(1.5);
  double dd = d;
  return std::pow(std::tgamma(dd) / std::tgamma(dd / 2.0), 1.0 / dd) /
         std::sqrt(std::numbers::pi * dd * (dd - 2.0));
}

ConstantsBundle kernel_constants(int d, double beta, double kappa, double c, double nu0) {
  if (d < 1 || beta < 0 || kappa < 0 || c < 1.0 || !(nu0 > 0))
    throw std::invalid_argument("kernel constants: need d >= 1, beta >= 0, kappa >= 0, c >= 1, nu0 > 0");
  ConstantsBundle b;
  b.d = d;
  b.beta = beta;
  b.kappa = kappa;
  b.c = c;
  b.nu0 = nu0;
  b.r = d >= 3 ? d : 3.0;
  b.rstar = 2.0 * b.r / (b.r - 2.0);
  b.moser = moser_sums(b.r, beta);
  double e2 = 2.0 * beta + 2.0;
  b.Hhat = Hhat(kappa, c, beta);
  b.H = std::max(std::pow(b.rstar, e2) * b.Hhat, nu0 / 2.0) * (2.0 * b.moser.A + b.moser.L);
  double base = std::pow(2.0, e2) * b.Hhat * e2;
  b.H1 = b.H * std::pow(base, -e2 / (2.0 * beta + 1.0));
  b.C1 = std::pow(2.0, e2) * b.Hhat;
  b.C2 = (2.0 * beta + 1.0) / e2 * std::pow(base, -1.0 / (2.0 * beta + 1.0));
  b.sobolev = sobolev_constant(d);
  double r = b.r;
  b.c_rd = std::pow(b.sobolev, d / r) * std::pow(static_cast<double>(d), d / (2.0 * r)) * std::pow(r, -d / (2.0 * r));
  b.C_dbeta = std::pow(b.c_rd, r / 2.0) * std::pow(b.moser.B, d / r) * std::numbers::e;
  double mx = std::max({1.0, b.H, b.H1});
  b.C0 = std::pow(2.0, d / 2.0) * b.C_dbeta * b.C_dbeta * std::pow(nu0, -d / 2.0) * std::pow(mx, d / 2.0);
  return b;
}

double gaussian_bound_rhs(const ConstantsBundle& b, double t, double dist) {
  if (!(t > 0) || dist < 0) throw std::invalid_argument("gaussian bound: need t > 0 and dist >= 0");
  double k = (2.0 * b.beta + 2.0) / (2.0 * b.beta + 1.0);
  double dk = std::pow(dist, k);
  double poly = std::pow(1.0 + 1.0 / t + std::pow(dist / t, k), b.d / 2.0);
  return b.C0 * poly * std::exp(b.C1 * t - b.C2 * std::pow(t, -1.0 / (2.0 * b.beta + 1.0)) * dk);
}

double optimal_sigma(const ConstantsBundle& b, double t, double delta_psi) {
  double e = 2.0 * b.beta + 1.0;
  double a = std::fabs(delta_psi);
  if (a == 0) return 0.0;
  double sgn = delta_psi > 0 ? 1.0 : -1.0;
  return std::pow(std::pow(2.0, 2.0 * b.beta + 2.0) * (2.0 * b.beta + 2.0) * b.Hhat * t, -1.0 / e) *
         std::pow(a, 1.0 / e) * sgn;
}

}  // namespace lpq
