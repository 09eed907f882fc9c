#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace entrans::quadrature {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

// Gauss-Legendre nodes/weights on [a, b], generated via Golub-Welsch.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n, double a, double b);

// Globally adaptive integration with an embedded GL 15/30 pair.
// Throws std::runtime_error when the interval budget is exhausted before the
// tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

// Tensor-product Gauss-Legendre on a rectangle, fixed order per axis.
double integrate_2d(const std::function<double(double, double)>& f, double ax,
                    double bx, double ay, double by, int order);

}  // namespace entrans::quadrature
