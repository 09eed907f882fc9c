#include "entrans/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace entrans::quadrature {

namespace {

// Legendre Jacobi matrix eigenproblem; nodes on [-1, 1]
GaussRule reference_rule(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

const GaussRule& cached_reference_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, reference_rule(n)).first;
  return it->second;
}

double apply_rule(const GaussRule& rule, const std::function<double(double)>& f,
                  double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

struct Interval {
  double a, b, estimate, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval evaluate(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& lo = cached_reference_rule(15);
  const GaussRule& hi = cached_reference_rule(30);
  const double coarse = apply_rule(lo, f, a, b);
  const double fine = apply_rule(hi, f, a, b);
  if (!std::isfinite(fine) || !std::isfinite(coarse)) {
    throw std::runtime_error("quadrature: non-finite integrand value");
  }
  return {a, b, fine, std::abs(fine - coarse)};
}

}  // namespace

GaussRule gauss_legendre(int n, double a, double b) {
  const GaussRule& ref = cached_reference_rule(n);
  GaussRule out;
  out.nodes.resize(n);
  out.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    out.nodes[i] = mid + half * ref.nodes[i];
    out.weights[i] = half * ref.weights[i];
  }
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
  if (a == b) return 0.0;
  std::vector<Interval> heap;
  heap.push_back(evaluate(f, a, b));
  double total = heap.front().estimate;
  double total_error = heap.front().error;
  int used = 1;
  const auto recompute = [&] {
    total = 0.0;
    total_error = 0.0;
    for (const Interval& iv : heap) {
      total += iv.estimate;
      total_error += iv.error;
    }
  };
  while (total_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (used >= opt.max_intervals) {
      recompute();
      if (total_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
      throw std::runtime_error("quadrature did not converge: error " +
                               std::to_string(total_error) + " after " +
                               std::to_string(used) + " intervals");
    }
    std::pop_heap(heap.begin(), heap.end());
    Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval at the resolution floor; retire it from refinement
      worst.error = 0.0;
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      recompute();
      continue;
    }
    const Interval left = evaluate(f, worst.a, mid);
    const Interval right = evaluate(f, mid, worst.b);
    total += left.estimate + right.estimate - worst.estimate;
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    ++used;
    if (used % 256 == 0) recompute();  // undo incremental rounding drift
  }
  return total;
}

double integrate_2d(const std::function<double(double, double)>& f, double ax,
                    double bx, double ay, double by, int order) {
  const GaussRule rx = gauss_legendre(order, ax, bx);
  const GaussRule ry = gauss_legendre(order, ay, by);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    double row = 0.0;
    for (int j = 0; j < order; ++j) {
      row += ry.weights[j] * f(rx.nodes[i], ry.nodes[j]);
    }
    sum += rx.weights[i] * row;
  }
  return sum;
}

}  // namespace entrans::quadrature
