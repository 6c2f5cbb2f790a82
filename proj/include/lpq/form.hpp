#pragma once

#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lpq/coeff.hpp"
#include "lpq/sparse_lu.hpp"

namespace lpq {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;

// Real sparse representation of the discrete form: a(u, v) = v^H S u.
// Unknown index = interior_node * m + component.
struct DiscreteForm {
  BoxDomain grid;
  int d = 1, m = 1;
  long N = 0;
  bool adjoint = false;
  double vol = 0;
  SpMat S;
  SpMat diffusion, coupling, driftB, driftC, potential;

  long size() const { return N * m; }
  std::vector<int> interior_dims() const;
  Eigen::VectorXd mass() const { return Eigen::VectorXd::Constant(size(), vol); }
  std::vector<int> fill_order() const;  // fill-reducing order of the unknowns
};

DiscreteForm assemble(const SampledSystem& s);
DiscreteForm assemble_adjoint(const SampledSystem& s);

cplx form_value(const DiscreteForm& F, const CVec& u, const CVec& v);

double pnorm(const CVec& u, int m, double vol, double p);
double pnorm(const Eigen::VectorXd& u, int m, double vol, double p);

CVec truncate_unit(const CVec& u, int m);
// |u|^(p-1) sign u, nodewise
CVec nittka_test_function(const CVec& u, int m, double p);
double nittka_value(const DiscreteForm& F, const CVec& u, double p);
double nittka_shifted(const DiscreteForm& F, const CVec& u, double p, double shift);

struct Omega0Options {
  int krylov = 60;
  int restarts = 8;
  double tol = 1e-12;
  unsigned long seed = 7;
};
struct Omega0Result {
  double omega0 = 0;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
};
// smallest eigenvalue of the symmetric pencil (H, diag(mass))
Omega0Result pencil_min_eig(const SpMat& H, const Eigen::VectorXd& mass, const Omega0Options& opt = {});
Omega0Result omega0(const DiscreteForm& F, const Omega0Options& opt = {});

// sum of random sine modes vanishing on the box boundary, frequencies up to
// min(kmax, n_k / 4) per axis, amplitudes decaying like 1/(1+|k|^2)
CVec smooth_random_field(const BoxDomain& g, int m, int kmax, std::mt19937_64& rng, bool complex_valued = true);

// interior samples of a field given pointwise
using PointField = std::function<void(const double* x, cplx* u, cplx* du)>;  // du[k*m + i]
CVec sample_interior(const BoxDomain& g, int m, const PointField& f);

// volume-weighted l1 gap between centred differences of truncate_unit(u) and
// the chain-rule expression for the truncated gradient built from (u, Du)
double truncation_gradient_error(const BoxDomain& g, int m, const PointField& f);

void write_triplets(const std::string& path, const SpMat& A);
void write_mass(const std::string& path, const DiscreteForm& F);

}  // namespace lpq
