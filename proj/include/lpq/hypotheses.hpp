#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpq/coeff.hpp"

namespace lpq {

struct HypMode {
  enum class Kind { Fixed, Refined, Kernel };
  Kind kind = Kind::Fixed;
  double gamma = 1.0, Cgamma = 1.0;  // fixed
  double a = 0.25, b = 0.5;          // refined, phi = max(phi_a, phi_b)
  double beta = 0.0, c = 1.0;        // kernel, R = c gamma^-beta

  static HypMode fixed(double gamma, double Cgamma);
  static HypMode refined(double a, double b);
  static HypMode kernel(double beta, double c);
  const char* name() const;
  // the additive term R(gamma) in the whitening matrix gamma V_S + R
  double R(double gamma) const;
};

struct Witness {
  long node = -1;
  std::vector<double> x;
  double value = 0.0;
};

struct HypothesisReport {
  HypMode mode;
  long nodes = 0;
  double v0 = 0, c0 = 0, kA = 0, kB = 0, kC = 0, kW = 0;
  double gamma = 0, Cgamma = 0, K = 0;
  double best_gamma = 0, best_K = 0;  // fixed mode: K-maximising gamma on the scan
  double gamma_sup_B = 0, gamma_sup_C = 0, gamma_sup_W = 0;  // where the sup over gamma was attained
  double lambdaQ_min = 0, A_re_min = 0;
  double beta = 0, c = 0, kappa = 0, nu0 = 0;
  std::vector<double> A_witness;  // theta for a nonnegativity violation
  std::map<std::string, bool> flags;
  std::map<std::string, Witness> worst;
  bool pass() const;
};

// per-node whitened data, reusable across gamma values
struct NodeDrift {
  Eigen::VectorXd lam;  // eigenvalues of V_S
  Mat Bw, Cw, Ww;       // rotated into the eigenbasis of V_S, Q-whitened
};

struct DriftTables {
  int m = 1;
  bool hasB = false, hasC = false, hasW = false;
  std::vector<NodeDrift> nodes;
};

DriftTables drift_tables(const SampledSystem& s);

double estimate_c0(const SampledField& V, Witness* worst = nullptr);
double estimate_v0(const SampledField& V, Witness* worst = nullptr);

struct KappaA {
  double kA = 0;
  double re_min = 0;  // min eigenvalue of the whitened symmetric part
  Witness worst, worst_re;
  std::vector<double> witness_theta;
};
KappaA estimate_kappa_A(const SampledSystem& s);

struct DriftEstimate {
  double kB = 0, kC = 0, kW = 0;
  double gB = 0, gC = 0, gW = 0;
  Witness wB, wC, wW;
};
// whitened singular values at one gamma with additive term R
DriftEstimate drift_at(const DriftTables& t, const BoxDomain& grid, double gamma, double R);
DriftEstimate estimate_drift_constants(const SampledSystem& s, const HypMode& mode);
DriftEstimate estimate_drift_constants(const DriftTables& t, const BoxDomain& grid, const HypMode& mode);

HypothesisReport check_all(const SampledSystem& s, const HypMode& mode);

// minimum slack of the defining inequalities over random complex pairs
struct ProbeResult {
  double slack_B = 0, slack_C = 0, slack_W = 0, slack_A = 0, slack_c0 = 0;
};
ProbeResult random_probe(const SampledSystem& s, double gamma, double R, const HypothesisReport& r,
                         int pairs_per_node, unsigned long seed, long max_nodes = -1);

}  // namespace lpq
