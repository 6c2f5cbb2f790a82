#pragma once

#include <string>
#include <vector>

#include "lpq/coeff.hpp"

namespace lpq {

// Riemannian-type weight w = lambda_{V_S}^{beta/(beta+1)} together with Q^{-1}
struct MetricField {
  BoxDomain grid;
  double beta = 0;
  std::vector<double> w;
  std::vector<Mat> Qinv;
};

MetricField weight_field(const SampledField& V, const SampledField& Q, const BoxDomain& grid, double beta);

struct DistanceMap {
  long source = 0;
  int stencil = 16;
  std::vector<double> dist;  // per grid node
};

// stencil in {4, 8, 16}: axis moves; plus all {-1,0,1} moves; plus primitive
// moves with entries up to 2 (the 2D names carry over to other dimensions)
std::vector<std::vector<int>> stencil_moves(int d, int stencil);
DistanceMap distance_map(const MetricField& f, long source, int stencil = 16);

struct Equivalence {
  double q0 = 0, q1 = 0;
  bool equivalent = false;
};
Equivalence euclid_equivalence_check(const MetricField& f, const SampledField& Q, double floor = 1e-3);

void write_distance_csv(const std::string& path, const DistanceMap& m, const BoxDomain& g);

}  // namespace lpq
