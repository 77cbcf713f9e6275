#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mott/model.hpp"

namespace mott::num {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t k = 0; k < n; ++k)
    out[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

inline std::vector<double> logspace(double a, double b, std::size_t n) {
  auto e = linspace(std::log(a), std::log(b), n);
  for (auto& v : e) v = std::exp(v);
  if (n > 0) {
    e.front() = a;
    e.back() = b;
  }
  return e;
}

// Root of f in [a, b] by plain bisection; f(a), f(b) must differ in sign.
// Stops when the bracket is below rel_tol * max(|a|, |b|) (or abs_tol).
template <class F>
double bisect(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0) {
  auto tol = [rel_tol, abs_tol](double lo, double hi) {
    return std::abs(hi - lo) <= std::max(abs_tol, rel_tol * std::max(std::abs(lo), std::abs(hi)));
  };
  std::uintmax_t iters = 400;
  try {
    auto r = boost::math::tools::bisect(f, a, b, tol, iters);
    return 0.5 * (r.first + r.second);
  } catch (const std::exception& e) {
    throw solver_error(std::string("bisection failed: ") + e.what());
  }
}

// Maximum of f on [a, b] by Brent's method; returns (argmax, max).  The
// attainable precision in the argument is about sqrt(epsilon), so rel_tol
// is capped there.
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double rel_tol = 1e-12,
                                     int max_iter = 300) {
  const int cap = std::numeric_limits<double>::digits / 2;
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(rel_tol))), 1, cap);
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto r = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, a, b, bits, iters);
  return {r.first, -r.second};
}

template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double rel_tol = 1e-12) {
  auto r = golden_max([&](double t) { return -f(t); }, a, b, rel_tol);
  return {r.first, -r.second};
}

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0, slope_stderr = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw invalid_parameter("linear_fit needs >= 2 paired samples");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = y[k] - (f.intercept + f.slope * x[k]);
    ssr += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  if (n > 2) f.slope_stderr = std::sqrt(ssr / (n - 2) / sxx);
  return f;
}

inline unsigned default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// out[k] = f(k) computed on up to `jobs` threads; order of results is fixed.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, F&& f) {
  std::vector<T> out(n);
  if (jobs == 0) jobs = default_jobs();
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] = f(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= n || failed.load()) return;
        try {
          out[k] = f(k);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace mott::num
