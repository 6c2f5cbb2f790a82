#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "lpq/form.hpp"

namespace lpq {

enum class Scheme { ImplicitEuler, CrankNicolson };
Scheme parse_scheme(const std::string& s);
const char* scheme_name(Scheme s);

class BlowUp : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// (M + theta dt S) u_{n+1} = (M - (1 - theta) dt S) u_n, factorised once.
class Stepper {
public:
  Stepper(const DiscreteForm& F, Scheme scheme, double dt, int residual_every = 64);

  // columns of X are independent real trajectories
  void advance(RowMat& X, long steps) const;
  // transposed recursion: the adjoint of advance in the mass inner product
  void advance_adjoint(RowMat& X, long steps) const;

  long steps_for(double t) const;
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  const DiscreteForm& form() const { return *F_; }
  double max_residual() const { return maxres_; }
  bool used_fallback() const { return solver_.used_fallback(); }

private:
  void step(RowMat& X, bool transpose, bool check) const;
  void run(RowMat& X, long steps, bool transpose) const;

  const DiscreteForm* F_;
  Scheme scheme_;
  double dt_, theta_;
  int every_;
  SpMat A_, B_;
  SpMat Ap_, Bp_;  // in factor order
  DirectSolver solver_;
  mutable double maxres_ = 0.0;
};

double default_dt(const DiscreteForm& F);

RowMat to_columns(const CVec& u);
CVec from_columns(const RowMat& X, int col = 0);

CVec evolve(const Stepper& st, const CVec& u0, double t);

struct GrowthTrace {
  double p = 2;
  std::vector<double> t, norm, slope;  // worst sample
  double max_slope = -std::numeric_limits<double>::infinity();
  double refined_slope = -std::numeric_limits<double>::infinity();
  double worst_t = 0;
  long worst_sample = -1;
  double bound = 0, tol = 0;
  bool pass = true;

  double measured() const { return std::max(max_slope, refined_slope); }
};

struct ProbeConfig {
  double t_final = 0.5;
  int samples = 50;
  int checkpoints = 50;
  int kmax = 6;
  unsigned long seed = 1;
  int refine_iters = 3;
  double refine_horizon = 0.1;
  bool complex_data = true;
};

// log-slope of the p-norm along random band-limited data, all p at once
std::vector<GrowthTrace> contractivity_probe(const Stepper& st, const std::vector<double>& ps, const ProbeConfig& cfg);

// |<T(t) f, g>_M - <f, T*(t) g>_M|; the adjoint side uses `adj` if given
// (a stepper built on the adjoint assembly), the transposed recursion otherwise
double adjoint_duality_check(const Stepper& st, const Stepper* adj, double t, const CVec& f, const CVec& g);

void write_growth_csv(const std::string& path, const std::vector<GrowthTrace>& traces);

}  // namespace lpq
