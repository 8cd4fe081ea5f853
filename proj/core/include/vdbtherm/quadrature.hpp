#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace vdbtherm::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

namespace detail {

// Kronrod 15-point nodes on [-1, 1]; odd entries are the Gauss 7-point nodes.
extern const double kXgk[8];
extern const double kWgk[8];
extern const double kWg[4];

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kron * h;
  const double err = std::abs((kron - gauss) * h);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Never throws; the caller inspects Result::converged.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  std::priority_queue<detail::Panel> heap;
  auto first = detail::gk15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  r.intervals = 1;
  auto done = [&] {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return error <= target;
  };
  while (!done() && r.intervals < opt.max_intervals) {
    auto p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      heap.push(p);
      break;
    }
    auto left = detail::gk15(f, p.a, m);
    auto right = detail::gk15(f, m, p.b);
    total += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
    ++r.intervals;
  }
  // Re-sum to shed accumulated rounding from the running updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.abs_error = error;
  r.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) ||
                error <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(total);
  return r;
}

/// Integral over [a, inf) via x = a + t / (1 - t).
template <class F>
Result integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    const double x = a + t / s;
    const double v = f(x) / (s * s);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, 0.0, 1.0, opt);
}

}  // namespace vdbtherm::quad
