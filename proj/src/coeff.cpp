#include "lpq/coeff.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lpq {

BoxDomain::BoxDomain(std::vector<double> lo, std::vector<double> hi, std::vector<int> cells)
    : d(static_cast<int>(lo.size())), lower(std::move(lo)), upper(std::move(hi)), n(std::move(cells)) {
  if (d < 1 || upper.size() != lower.size() || n.size() != lower.size())
    throw std::invalid_argument("box: inconsistent dimensions");
  for (int k = 0; k < d; ++k) {
    if (!(lower[k] < upper[k])) throw std::invalid_argument("box: lower must be below upper");
    if (n[k] < 2) throw std::invalid_argument("box: need at least 2 cells per axis");
  }
}

BoxDomain BoxDomain::cube(int d, double lo, double hi, int cells) {
  return BoxDomain(std::vector<double>(d, lo), std::vector<double>(d, hi), std::vector<int>(d, cells));
}

double BoxDomain::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < d; ++k) v *= h(k);
  return v;
}

long BoxDomain::node_count() const {
  long c = 1;
  for (int k = 0; k < d; ++k) c *= n[k] + 1;
  return c;
}

long BoxDomain::interior_count() const {
  long c = 1;
  for (int k = 0; k < d; ++k) c *= n[k] - 1;
  return c;
}

std::vector<int> BoxDomain::node_multi(long idx) const {
  std::vector<int> mi(d);
  for (int k = 0; k < d; ++k) {
    mi[k] = static_cast<int>(idx % (n[k] + 1));
    idx /= n[k] + 1;
  }
  return mi;
}

long BoxDomain::node_index(const std::vector<int>& mi) const {
  long idx = 0;
  for (int k = d - 1; k >= 0; --k) idx = idx * (n[k] + 1) + mi[k];
  return idx;
}

std::vector<int> BoxDomain::interior_multi(long idx) const {
  std::vector<int> mi(d);
  for (int k = 0; k < d; ++k) {
    mi[k] = static_cast<int>(idx % (n[k] - 1)) + 1;
    idx /= n[k] - 1;
  }
  return mi;
}

long BoxDomain::interior_index(const std::vector<int>& mi) const {
  long idx = 0;
  for (int k = d - 1; k >= 0; --k) {
    if (mi[k] < 1 || mi[k] > n[k] - 1) return -1;
    idx = idx * (n[k] - 1) + (mi[k] - 1);
  }
  return idx;
}

long BoxDomain::interior_to_node(long idx) const { return node_index(interior_multi(idx)); }

std::vector<double> BoxDomain::coords(const std::vector<int>& mi) const {
  std::vector<double> x(d);
  for (int k = 0; k < d; ++k) x[k] = lower[k] + mi[k] * h(k);
  return x;
}

void BoxDomain::coords(long node, double* x) const {
  for (int k = 0; k < d; ++k) {
    int i = static_cast<int>(node % (n[k] + 1));
    node /= n[k] + 1;
    x[k] = lower[k] + i * h(k);
  }
}

bool BoxDomain::is_boundary(const std::vector<int>& mi) const {
  for (int k = 0; k < d; ++k)
    if (mi[k] == 0 || mi[k] == n[k]) return true;
  return false;
}

BoxDomain BoxDomain::refined() const {
  std::vector<int> c(n);
  for (auto& v : c) v *= 2;
  return BoxDomain(lower, upper, c);
}

bool MatrixField::is_zero() const {
  if (table) return false;
  for (const auto& e : entries)
    if (e) return false;
  return true;
}

void MatrixField::set(int i, int j, const std::string& text, int dim) {
  entries.at(static_cast<std::size_t>(i) * cols + j) = parse_expr(text, dim);
}

Mat MatrixField::at(const double* x, int dim) const {
  Mat out = Mat::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const Expr& e = entries[static_cast<std::size_t>(i) * cols + j];
      if (e) out(i, j) = eval(e, x, dim);
    }
  return out;
}

CoefficientSystem::CoefficientSystem(int d_, int m_) : d(d_), m(m_), Q(d_, d_), V(m_, m_), W(m_, m_) {}

bool CoefficientSystem::has_A() const {
  for (const auto& row : A)
    for (const auto& f : row)
      if (f.rows && !f.is_zero()) return true;
  return false;
}
bool CoefficientSystem::has_B() const {
  for (const auto& f : B)
    if (f.rows && !f.is_zero()) return true;
  return false;
}
bool CoefficientSystem::has_C() const {
  for (const auto& f : C)
    if (f.rows && !f.is_zero()) return true;
  return false;
}
bool CoefficientSystem::has_W() const { return W.rows && !W.is_zero(); }

SampledField sample_field(const MatrixField& f, const BoxDomain& grid) {
  SampledField s;
  s.rows = f.rows;
  s.cols = f.cols;
  long N = grid.node_count();
  if (f.table) {
    if (static_cast<long>(f.table->size()) != N)
      throw std::runtime_error("table has " + std::to_string(f.table->size()) +
                               " nodes, grid has " + std::to_string(N));
    s.values = *f.table;
    return s;
  }
  s.values.resize(N);
  std::vector<double> x(grid.d);
  for (long i = 0; i < N; ++i) {
    grid.coords(i, x.data());
    try {
      s.values[i] = f.rows ? f.at(x.data(), grid.d) : Mat();
    } catch (const DomainError& e) {
      std::ostringstream os;
      os << e.what() << " at node (";
      for (int k = 0; k < grid.d; ++k) os << (k ? ", " : "") << x[k];
      os << ")";
      throw DomainError(os.str());
    }
    if (!s.values[i].allFinite()) throw DomainError("non-finite coefficient value");
  }
  return s;
}

SampledSystem sample(const CoefficientSystem& sys, const BoxDomain& grid) {
  if (grid.d != sys.d) throw std::invalid_argument("grid dimension does not match system");
  SampledSystem s;
  s.grid = grid;
  s.d = sys.d;
  s.m = sys.m;
  s.Q = symmetric_part(sample_field(sys.Q, grid));
  s.V = sample_field(sys.V, grid);
  s.hasA = sys.has_A();
  s.hasB = sys.has_B();
  s.hasC = sys.has_C();
  s.hasW = sys.has_W();
  auto zero = [&](int r, int c) {
    SampledField z;
    z.rows = r;
    z.cols = c;
    z.values.assign(grid.node_count(), Mat::Zero(r, c));
    return z;
  };
  if (s.hasA) {
    s.A.resize(sys.d);
    for (int h = 0; h < sys.d; ++h)
      for (int k = 0; k < sys.d; ++k) {
        const MatrixField* f = (h < static_cast<int>(sys.A.size()) && k < static_cast<int>(sys.A[h].size()))
                                   ? &sys.A[h][k] : nullptr;
        s.A[h].push_back(f && f->rows ? sample_field(*f, grid) : zero(sys.m, sys.m));
      }
  }
  auto vec = [&](const std::vector<MatrixField>& src, bool has, std::vector<SampledField>& dst) {
    if (!has) return;
    for (int h = 0; h < sys.d; ++h) {
      const MatrixField* f = h < static_cast<int>(src.size()) ? &src[h] : nullptr;
      dst.push_back(f && f->rows ? sample_field(*f, grid) : zero(sys.m, sys.m));
    }
  };
  vec(sys.B, s.hasB, s.B);
  vec(sys.C, s.hasC, s.C);
  s.W = s.hasW ? sample_field(sys.W, grid) : zero(sys.m, sys.m);
  return s;
}

SampledField symmetric_part(const SampledField& f) {
  if (f.rows != f.cols) throw std::invalid_argument("symmetric_part: square matrices required");
  SampledField s = f;
  for (auto& v : s.values) v = 0.5 * (v + v.transpose()).eval();
  return s;
}

double sym_min_eig(const Mat& s) {
  if (!s.allFinite()) throw DomainError("non-finite matrix entry");
  if (s.rows() == 1) return s(0, 0);
  if (s.rows() == 2) {
    double a = s(0, 0), b = 0.5 * (s(0, 1) + s(1, 0)), c = s(1, 1);
    return 0.5 * (a + c) - std::hypot(0.5 * (a - c), b);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double sym_max_eig(const Mat& s) {
  if (!s.allFinite()) throw DomainError("non-finite matrix entry");
  if (s.rows() == 1) return s(0, 0);
  if (s.rows() == 2) {
    double a = s(0, 0), b = 0.5 * (s(0, 1) + s(1, 0)), c = s(1, 1);
    return 0.5 * (a + c) + std::hypot(0.5 * (a - c), b);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(s.rows() - 1);
}

std::vector<double> min_eigen_field(const SampledField& f) {
  std::vector<double> out(f.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sym_min_eig(f.values[i]);
  return out;
}

std::vector<double> max_eigen_field(const SampledField& f) {
  std::vector<double> out(f.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sym_max_eig(f.values[i]);
  return out;
}

Mat inv_sqrt_spd(const Mat& s) {
  if (s.rows() == 1) {
    if (!(s(0, 0) > 0)) throw DomainError("matrix not positive definite");
    return Mat::Constant(1, 1, 1.0 / std::sqrt(s(0, 0)));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  if (!(es.eigenvalues()(0) > 0)) throw DomainError("matrix not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

std::vector<Mat> load_table_csv(const std::string& path, int rows, int cols, long nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table '" + path + "'");
  std::vector<Mat> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != rows * cols)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(rows * cols) + " columns");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = vals[i * cols + j];
    out.push_back(m);
  }
  if (static_cast<long>(out.size()) != nodes)
    throw std::runtime_error(path + ": expected " + std::to_string(nodes) + " rows, got " +
                             std::to_string(out.size()));
  return out;
}

}  // namespace lpq
