#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace lpq {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct IntervalSpec {
  enum class Kind { AllP, LeftClosed, RightClosed, Closed, Open };
  Kind kind = Kind::AllP;
  double lo = 1.0, hi = kInf;

  bool contains(double p) const;
  double midpoint() const;  // finite representative, used for probes
  std::string str() const;
  static const char* kind_name(Kind k);
};

struct DriftConstants {
  double kA = 0, kB = 0, kC = 0, kW = 0;
};

class HypothesisViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double K_value(double kB, double kC, double kW, double gamma);
double delta1(double kA, double kB, double kC, double K);
double delta2(double kA, double kB, double kC, double K);

IntervalSpec admissible_interval(double kA, double kB, double kC, double kW, double gamma);

// 3x3 matrix whose semidefiniteness encodes the sign condition, p >= 2
Eigen::Matrix3d M_gamma(double kA, double kB, double kC, double kW, double gamma, double p);
bool mgamma_admissible(double kA, double kB, double kC, double kW, double gamma, double p);
std::vector<char> psd_sweep_Mgamma(double kA, double kB, double kC, double kW, double gamma,
                                   const std::vector<double>& p_grid);
// first and last admissible grid points
struct SweepBounds {
  double lo = kInf, hi = -kInf;
  bool contiguous = true;
};
SweepBounds sweep_bounds(const std::vector<double>& p_grid, const std::vector<char>& admissible);
// endpoints of `s` clipped to the grid agree with the sweep within `step`
bool sweep_agrees(const IntervalSpec& s, const std::vector<double>& p_grid, const std::vector<char>& admissible,
                  double step);
std::vector<double> default_p_grid(double lo = 1.001, double hi = 64.0, double step = 1e-3);

// open p-range of the refined (gamma-dependent) estimate
std::pair<double, double> refined_p_range(double kA);
double gamma_p(double kA, double kB, double kC, double kW, double p);
bool psd_check_Egamma(double kA, double kB, double kC, double kW, double gamma, double p);
double Egamma_value(double kA, double kB, double kC, double kW, double gamma, double p, double x, double y);

double phi_a(double a, double gamma);
double phi_b(double b, double gamma);
double phi_power(double a, double b, double gamma);
double growth_exponent(const std::function<double(double)>& phi, double gp);
// closed form of phi(gamma_p)/gamma_p for b = 2a and kappa_B = kappa_C = kappa sqrt(d)
double growth_exponent_b2a(double a, double kappa, double kW, int d, double kA, double p);
double growth_prefactor(double a);

struct Tau {
  double tau, hat_tau;
};
Tau tau_constants(double kappa, double c, double beta, double p, double sigma);
double Hhat(double kappa, double c, double beta);

struct MoserSums {
  double r = 3, R = 1.5, q = 0, A = 0, B = 0, L = 0;
  int B_terms = 0;
};
MoserSums moser_sums(double r, double beta);
double moser_t(double r, double beta, int j);
double moser_p(double r, int j);
double moser_sum_t(double r, double beta, int jmax);
double moser_sum_inv_p(double r, int jmax);
double moser_L_direct(double r, double beta, int jmax);
double moser_B_closed(double r, double beta);

// explicit upper bound for the Gagliardo-Nirenberg constant used in the proof
double sobolev_constant(int d);

struct ConstantsBundle {
  int d = 1;
  double beta = 0, kappa = 0, c = 1, nu0 = 1;
  double r = 3, rstar = 6;
  MoserSums moser;
  double Hhat = 0, H = 0, H1 = 0;
  double sobolev = 1, c_rd = 0, C_dbeta = 0;
  double C0 = 0, C1 = 0, C2 = 0;
};
ConstantsBundle kernel_constants(int d, double beta, double kappa, double c, double nu0);
double gaussian_bound_rhs(const ConstantsBundle& b, double t, double dist);
double optimal_sigma(const ConstantsBundle& b, double t, double delta_psi);

}  // namespace lpq
