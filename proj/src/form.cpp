#include "lpq/form.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace lpq {

std::vector<int> DiscreteForm::interior_dims() const {
  std::vector<int> dims(d);
  for (int k = 0; k < d; ++k) dims[k] = grid.n[k] - 1;
  return dims;
}

std::vector<int> DiscreteForm::fill_order() const { return amd_order(S); }

namespace {

using Trip = Eigen::Triplet<double>;

// Both assemblies run the same loops so that every entry of the adjoint is
// produced by the same floating-point operations as the mirrored entry of
// the primal operator; duplicate triplets are summed in insertion order.
void assemble_into(const SampledSystem& s, bool adj, DiscreteForm& F) {
  const BoxDomain& g = s.grid;
  const int d = s.d, m = s.m;
  if (d > 8) throw std::invalid_argument("assemble: dimension too large");
  F.grid = g;
  F.d = d;
  F.m = m;
  F.N = g.interior_count();
  F.adjoint = adj;
  F.vol = g.cell_volume();
  const long n = F.N * m;
  const double vol = F.vol;
  const int nc = 1 << d;
  const double w = vol / nc;

  const long nn = g.node_count();
  std::vector<long> inner(nn, -1);
  for (long i = 0; i < F.N; ++i) inner[g.interior_to_node(i)] = i;
  std::vector<long> stride(d, 1);
  for (int k = 1; k < d; ++k) stride[k] = stride[k - 1] * (g.n[k - 1] + 1);
  std::vector<long> off(nc, 0);
  for (int a = 0; a < nc; ++a)
    for (int k = 0; k < d; ++k)
      if (a >> k & 1) off[a] += stride[k];
  std::vector<double> ih(d), ih2(d);
  for (int k = 0; k < d; ++k) {
    ih[k] = 1.0 / g.h(k);
    ih2[k] = 0.5 / g.h(k);
  }

  long cells = 1;
  for (int k = 0; k < d; ++k) cells *= g.n[k];

  std::vector<Trip> tD, tA, tB, tC, tP;
  tD.reserve(static_cast<size_t>(cells) * nc * nc * m);
  if (s.hasA) tA.reserve(static_cast<size_t>(cells) * nc * nc * m * m);

  // gradient of the corner-sigma edge along axis h, evaluated on local node a
  auto G = [&](int sigma, int h, int a) -> double {
    for (int k = 0; k < d; ++k)
      if (k != h && ((a ^ sigma) >> k & 1)) return 0.0;
    return (a >> h & 1) ? ih[h] : -ih[h];
  };

  std::vector<double> Gt(static_cast<size_t>(nc) * d * nc);
  for (int sg = 0; sg < nc; ++sg)
    for (int h = 0; h < d; ++h)
      for (int a = 0; a < nc; ++a) Gt[(static_cast<size_t>(sg) * d + h) * nc + a] = G(sg, h, a);
  auto Gv = [&](int sg, int h, int a) { return Gt[(static_cast<size_t>(sg) * d + h) * nc + a]; };

  std::vector<int> c(d, 0);
  std::vector<long> gn(nc);
  Mat Ld(nc, nc), La(nc * m, nc * m);
  for (long cell = 0; cell < cells; ++cell) {
    long base = 0;
    for (int k = 0; k < d; ++k) base += c[k] * stride[k];
    bool any = false;
    for (int a = 0; a < nc; ++a) {
      gn[a] = inner[base + off[a]];
      any = any || gn[a] >= 0;
    }
    if (any) {
      Ld.setZero();
      for (int sg = 0; sg < nc; ++sg) {
        const Mat& q = s.Q.values[base + off[sg]];
        for (int a = 0; a < nc; ++a) {
          if (gn[a] < 0) continue;
          for (int b = 0; b < nc; ++b) {
            if (gn[b] < 0) continue;
            double acc = 0.0;
            for (int h = 0; h < d; ++h) acc += (Gv(sg, h, a) * Gv(sg, h, b)) * q(h, h);
            for (int h = 0; h < d; ++h)
              for (int k = h + 1; k < d; ++k)
                acc += (Gv(sg, h, a) * Gv(sg, k, b)) * q(h, k) + (Gv(sg, k, a) * Gv(sg, h, b)) * q(k, h);
            Ld(a, b) += w * acc;
          }
        }
      }
      for (int a = 0; a < nc; ++a) {
        if (gn[a] < 0) continue;
        for (int b = 0; b < nc; ++b) {
          if (gn[b] < 0 || Ld(a, b) == 0.0) continue;
          for (int i = 0; i < m; ++i) tD.emplace_back(gn[a] * m + i, gn[b] * m + i, Ld(a, b));
        }
      }

      if (s.hasA) {
        La.setZero();
        // block (h,k) of the corner matrix; the adjoint uses (A^{kh})^T
        auto Aent = [&](long node, int h, int k, int i, int j) {
          return adj ? s.A[k][h].values[node](j, i) : s.A[h][k].values[node](i, j);
        };
        for (int sg = 0; sg < nc; ++sg) {
          long node = base + off[sg];
          for (int a = 0; a < nc; ++a) {
            if (gn[a] < 0) continue;
            for (int b = 0; b < nc; ++b) {
              if (gn[b] < 0) continue;
              for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                  double acc = 0.0;
                  for (int h = 0; h < d; ++h) acc += (Gv(sg, h, a) * Gv(sg, h, b)) * Aent(node, h, h, i, j);
                  for (int h = 0; h < d; ++h)
                    for (int k = h + 1; k < d; ++k)
                      acc += (Gv(sg, h, a) * Gv(sg, k, b)) * Aent(node, h, k, i, j) +
                             (Gv(sg, k, a) * Gv(sg, h, b)) * Aent(node, k, h, i, j);
                  La(a * m + i, b * m + j) += w * acc;
                }
            }
          }
        }
        for (int a = 0; a < nc; ++a) {
          if (gn[a] < 0) continue;
          for (int i = 0; i < m; ++i)
            for (int b = 0; b < nc; ++b) {
              if (gn[b] < 0) continue;
              for (int j = 0; j < m; ++j) {
                double v = La(a * m + i, b * m + j);
                if (v != 0.0) tA.emplace_back(gn[a] * m + i, gn[b] * m + j, v);
              }
            }
        }
      }
    }
    for (int k = 0; k < d; ++k) {
      if (++c[k] < g.n[k]) break;
      c[k] = 0;
    }
  }

  // first-order terms and the potential, nodal quadrature with centred differences
  const bool useB = adj ? s.hasC : s.hasB;
  const bool useC = adj ? s.hasB : s.hasC;
  auto Bent = [&](int h, long node, int i, int j) {
    return adj ? s.C[h].values[node](j, i) : s.B[h].values[node](i, j);
  };
  auto Cent = [&](int h, long node, int i, int j) {
    return adj ? s.B[h].values[node](j, i) : s.C[h].values[node](i, j);
  };
  for (long x = 0; x < F.N; ++x) {
    long node = g.interior_to_node(x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double v = s.V.values[node](i, j);
        double wv = adj ? s.V.values[node](j, i) : v;
        if (s.hasW) wv += adj ? s.W.values[node](j, i) : s.W.values[node](i, j);
        double val = vol * wv;
        if (val != 0.0) tP.emplace_back(x * m + i, x * m + j, val);
      }
    for (int h = 0; h < d; ++h) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        long y = inner[node + sgn * stride[h]];
        if (y < 0) continue;
        double sc = sgn * ih2[h];
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            if (useB) {
              double val = (vol * Bent(h, node, i, j)) * sc;
              if (val != 0.0) tB.emplace_back(x * m + i, y * m + j, val);
            }
            if (useC) {
              double val = (vol * Cent(h, node, i, j)) * sc;
              if (val != 0.0) tC.emplace_back(y * m + i, x * m + j, val);
            }
          }
      }
    }
  }

  auto build = [n](SpMat& M, std::vector<Trip>& t) {
    M.resize(n, n);
    M.setFromTriplets(t.begin(), t.end());
    std::vector<Trip>().swap(t);
  };
  build(F.diffusion, tD);
  build(F.coupling, tA);
  build(F.driftB, tB);
  build(F.driftC, tC);
  build(F.potential, tP);
  SpMat dc = F.diffusion + F.coupling;
  SpMat bc = F.driftB + F.driftC;
  SpMat lo = dc + bc;
  F.S = lo + F.potential;
  F.S.makeCompressed();
}

}  // namespace

DiscreteForm assemble(const SampledSystem& s) {
  DiscreteForm F;
  assemble_into(s, false, F);
  return F;
}

DiscreteForm assemble_adjoint(const SampledSystem& s) {
  DiscreteForm F;
  assemble_into(s, true, F);
  return F;
}

cplx form_value(const DiscreteForm& F, const CVec& u, const CVec& v) {
  if (u.size() != F.size() || v.size() != F.size()) throw std::invalid_argument("form_value: size mismatch");
  Eigen::VectorXd ur = u.real(), ui = u.imag();
  Eigen::VectorXd sr = F.S * ur, si = F.S * ui;
  CVec Su(u.size());
  Su.real() = sr;
  Su.imag() = si;
  return v.dot(Su);  // conjugates v
}

double pnorm(const CVec& u, int m, double vol, double p) {
  long N = u.size() / m;
  if (std::isinf(p)) {
    double mx = 0.0;
    for (long x = 0; x < N; ++x) mx = std::max(mx, u.segment(x * m, m).norm());
    return mx;
  }
  double s = 0.0;
  for (long x = 0; x < N; ++x) {
    double r = u.segment(x * m, m).norm();
    if (r > 0) s += std::pow(r, p);
  }
  return std::pow(s * vol, 1.0 / p);
}

double pnorm(const Eigen::VectorXd& u, int m, double vol, double p) {
  long N = u.size() / m;
  if (std::isinf(p)) {
    double mx = 0.0;
    for (long x = 0; x < N; ++x) mx = std::max(mx, u.segment(x * m, m).norm());
    return mx;
  }
  double s = 0.0;
  for (long x = 0; x < N; ++x) {
    double r = u.segment(x * m, m).norm();
    if (r > 0) s += std::pow(r, p);
  }
  return std::pow(s * vol, 1.0 / p);
}

CVec truncate_unit(const CVec& u, int m) {
  CVec out = u;
  long N = u.size() / m;
  for (long x = 0; x < N; ++x) {
    double r = u.segment(x * m, m).norm();
    if (r > 1.0) out.segment(x * m, m) /= r;
  }
  return out;
}

CVec nittka_test_function(const CVec& u, int m, double p) {
  CVec w = u;
  long N = u.size() / m;
  for (long x = 0; x < N; ++x) {
    double r = u.segment(x * m, m).norm();
    if (r > 0)
      w.segment(x * m, m) *= std::pow(r, p - 2.0);
    else
      w.segment(x * m, m).setZero();
  }
  return w;
}

double nittka_value(const DiscreteForm& F, const CVec& u, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("nittka_value: p must exceed 1");
  return form_value(F, u, nittka_test_function(u, F.m, p)).real();
}

double nittka_shifted(const DiscreteForm& F, const CVec& u, double p, double shift) {
  double np = pnorm(u, F.m, F.vol, p);
  return nittka_value(F, u, p) + shift * std::pow(np, p);
}

Omega0Result pencil_min_eig(const SpMat& H, const Eigen::VectorXd& mass, const Omega0Options& opt) {
  const long n = H.rows();
  Omega0Result res;
  if (n == 0) throw std::invalid_argument("omega0: empty operator");
  Eigen::VectorXd is = mass.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> Hs = (is.asDiagonal() * H * is.asDiagonal()).eval();
  Hs = (0.5 * (Hs + Eigen::SparseMatrix<double>(Hs.transpose()))).eval();

  if (n <= 200) {
    Eigen::MatrixXd D = Hs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
    res.omega0 = es.eigenvalues()(0);
    res.converged = true;
    return res;
  }

  double ghi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (long k = 0; k < Hs.outerSize(); ++k) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(Hs, k); it; ++it) {
      if (it.row() == k)
        diag = it.value();
      else
        off += std::fabs(it.value());
    }
    lo = std::min(lo, diag - off);
    ghi = std::max(ghi, std::fabs(diag) + off);
  }
  const double scale = std::max(ghi, 1e-300);
  double sigma = lo - 1e-6 * scale;

  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd start(n);
  for (long i = 0; i < n; ++i) start(i) = nd(rng);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  auto factor_pd = [&](double sh) {
    ldlt.compute(Hs - sh * I);
    if (ldlt.info() != Eigen::Success) return false;
    return (ldlt.vectorD().array() > 0).all();
  };
  if (!factor_pd(sigma)) {
    for (int t = 0; t < 60 && !factor_pd(sigma); ++t) sigma -= std::max(1.0, std::fabs(sigma));
    if (!factor_pd(sigma)) throw std::runtime_error("omega0: cannot find a definite shift");
  }

  double lambda = 0.0;
  Eigen::VectorXd ritz;
  const int kmax = static_cast<int>(std::min<long>(opt.krylov, n));
  for (int restart = 0; restart <= opt.restarts; ++restart) {
    Eigen::MatrixXd Vb(n, kmax + 1);
    Eigen::VectorXd alpha(kmax), beta(kmax);
    Vb.col(0) = start.normalized();
    int k = 0;
    for (; k < kmax; ++k) {
      Eigen::VectorXd wv = ldlt.solve(Vb.col(k));
      alpha(k) = Vb.col(k).dot(wv);
      wv -= alpha(k) * Vb.col(k);
      if (k > 0) wv -= beta(k - 1) * Vb.col(k - 1);
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j <= k; ++j) wv -= Vb.col(j).dot(wv) * Vb.col(j);
      beta(k) = wv.norm();
      ++res.iterations;
      if (beta(k) <= 1e-14 * std::fabs(alpha(k))) {
        ++k;
        break;
      }
      Vb.col(k + 1) = wv / beta(k);
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      T(j, j) = alpha(j);
      if (j + 1 < k) T(j, j + 1) = T(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    double theta = es.eigenvalues()(k - 1);
    ritz = Vb.leftCols(k) * es.eigenvectors().col(k - 1);
    ritz.normalize();
    lambda = sigma + 1.0 / theta;
    Eigen::VectorXd Hr = Hs * ritz;
    lambda = ritz.dot(Hr);  // Rayleigh quotient is the sharper estimate
    res.residual = (Hr - lambda * ritz).norm();
    if (res.residual <= opt.tol * scale) {
      res.converged = true;
      break;
    }
    // move the shift next to the estimate, staying below the spectrum
    double delta = 1e-3 * std::max(std::fabs(lambda), 1e-3 * scale) + res.residual;
    double cand = lambda - delta;
    int tries = 0;
    while (!factor_pd(cand) && tries++ < 40) {
      delta *= 4.0;
      cand = lambda - delta;
    }
    if (tries > 40)
      factor_pd(sigma);
    else
      sigma = cand;
    start = ritz;
  }
  res.omega0 = lambda;
  return res;
}

Omega0Result omega0(const DiscreteForm& F, const Omega0Options& opt) {
  SpMat St = F.S.transpose();
  SpMat H = 0.5 * (F.S + St);
  Omega0Result r = pencil_min_eig(H, F.mass(), opt);
  r.omega0 = -r.omega0;
  return r;
}

CVec smooth_random_field(const BoxDomain& g, int m, int kmax, std::mt19937_64& rng, bool complex_valued) {
  const int d = g.d;
  std::vector<int> J(d);
  long modes = 1;
  for (int k = 0; k < d; ++k) {
    J[k] = std::max(1, std::min(kmax, g.n[k] / 4));
    modes *= J[k];
  }
  std::normal_distribution<double> nd;
  std::vector<cplx> coef(static_cast<size_t>(modes) * m);
  {
    std::vector<int> j(d, 0);
    for (long t = 0; t < modes; ++t) {
      double k2 = 0.0;
      for (int k = 0; k < d; ++k) k2 += double(j[k] + 1) * (j[k] + 1);
      double amp = 1.0 / (1.0 + k2);
      for (int i = 0; i < m; ++i) {
        double re = nd(rng), im = complex_valued ? nd(rng) : 0.0;
        coef[t * m + i] = amp * cplx(re, im);
      }
      for (int k = 0; k < d; ++k) {
        if (++j[k] < J[k]) break;
        j[k] = 0;
      }
    }
  }
  // sine tables per axis over interior indices
  std::vector<std::vector<double>> tab(d);
  for (int k = 0; k < d; ++k) {
    int ni = g.n[k] - 1;
    tab[k].resize(static_cast<size_t>(J[k]) * ni);
    for (int jj = 0; jj < J[k]; ++jj)
      for (int i = 0; i < ni; ++i) tab[k][jj * ni + i] = std::sin(M_PI * (jj + 1) * (i + 1) / g.n[k]);
  }
  const long N = g.interior_count();
  CVec u = CVec::Zero(N * m);
  std::vector<int> mi(d, 0), j(d, 0);
  for (long x = 0; x < N; ++x) {
    std::fill(j.begin(), j.end(), 0);
    for (long t = 0; t < modes; ++t) {
      double prod = 1.0;
      for (int k = 0; k < d; ++k) prod *= tab[k][j[k] * (g.n[k] - 1) + mi[k]];
      for (int i = 0; i < m; ++i) u(x * m + i) += prod * coef[t * m + i];
      for (int k = 0; k < d; ++k) {
        if (++j[k] < J[k]) break;
        j[k] = 0;
      }
    }
    for (int k = 0; k < d; ++k) {
      if (++mi[k] < g.n[k] - 1) break;
      mi[k] = 0;
    }
  }
  return u;
}

CVec sample_interior(const BoxDomain& g, int m, const PointField& f) {
  const long N = g.interior_count();
  CVec u(N * m);
  std::vector<double> x(g.d);
  std::vector<cplx> val(m), du(static_cast<size_t>(m) * g.d);
  for (long i = 0; i < N; ++i) {
    g.coords(g.interior_to_node(i), x.data());
    f(x.data(), val.data(), du.data());
    for (int c = 0; c < m; ++c) u(i * m + c) = val[c];
  }
  return u;
}

double truncation_gradient_error(const BoxDomain& g, int m, const PointField& f) {
  const int d = g.d;
  std::vector<double> x(d), y(d);
  std::vector<cplx> u(m), du(static_cast<size_t>(m) * d), up(m), um(m), scratch(static_cast<size_t>(m) * d);
  auto trunc = [m](std::vector<cplx>& v) {
    double r = 0.0;
    for (int i = 0; i < m; ++i) r += std::norm(v[i]);
    r = std::sqrt(r);
    if (r > 1.0)
      for (auto& e : v) e /= r;
  };
  double err = 0.0;
  const double vol = g.cell_volume();
  for (long node = 0; node < g.node_count(); ++node) {
    std::vector<int> mi = g.node_multi(node);
    bool inside = true;
    for (int k = 0; k < d; ++k) inside = inside && mi[k] >= 1 && mi[k] <= g.n[k] - 1;
    if (!inside) continue;
    g.coords(node, x.data());
    f(x.data(), u.data(), du.data());
    double r = 0.0;
    for (int i = 0; i < m; ++i) r += std::norm(u[i]);
    r = std::sqrt(r);
    for (int k = 0; k < d; ++k) {
      y = x;
      y[k] = x[k] + g.h(k);
      f(y.data(), up.data(), scratch.data());
      y[k] = x[k] - g.h(k);
      f(y.data(), um.data(), scratch.data());
      trunc(up);
      trunc(um);
      // chain rule: (|u| ^ 1)/|u| Du - sign(u) D|u| / |u| on {|u| > 1}
      double dr = 0.0;
      if (r > 0)
        for (int i = 0; i < m; ++i) dr += std::real(std::conj(u[i]) * du[k * m + i]) / r;
      for (int i = 0; i < m; ++i) {
        cplx fd = (up[i] - um[i]) / (2.0 * g.h(k));
        cplx ex = 0.0;
        if (r > 0) {
          ex = (std::min(r, 1.0) / r) * du[k * m + i];
          if (r > 1.0) ex -= (u[i] / r) * dr / r;
        }
        err += vol * std::abs(fd - ex);
      }
    }
  }
  return err;
}

void write_triplets(const std::string& path, const SpMat& A) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write " + path);
  for (long i = 0; i < A.outerSize(); ++i)
    for (SpMat::InnerIterator it(A, i); it; ++it)
      std::fprintf(fp, "%ld %ld %.17g %.17g\n", static_cast<long>(it.row()) + 1, static_cast<long>(it.col()) + 1,
                   it.value(), 0.0);
  std::fclose(fp);
}

void write_mass(const std::string& path, const DiscreteForm& F) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write " + path);
  for (long i = 0; i < F.size(); ++i) std::fprintf(fp, "%ld %ld %.17g %.17g\n", i + 1, i + 1, F.vol, 0.0);
  std::fclose(fp);
}

}  // namespace lpq
