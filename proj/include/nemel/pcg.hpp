#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nemel/common.hpp"

namespace nemel {

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  std::vector<double> residual_history;  // ||r|| per iteration
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace detail

/// Preconditioned conjugate gradients on an SPD operator. A(x, y) writes y=Ax,
/// M(r, z) applies the preconditioner. Stops at ||r|| <= tol*||b||; throws
/// numerical_error on breakdown or when max_iter is exhausted. A nonnull x0
/// warm-starts the iteration (the stopping target stays tol*||b||).
template <class Apply, class Prec>
SolveStats pcg(std::vector<double>& x, const std::vector<double>& b, Apply&& A, Prec&& M,
               double tol, int max_iter, const char* what,
               const std::vector<double>* x0 = nullptr) {
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(detail::dot(b, b));
  SolveStats stats;
  std::vector<double> r;
  if (x0 != nullptr && x0->size() == n) {
    x = *x0;
    A(x, r);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
  } else {
    x.assign(n, 0.0);
    r = b;
  }
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    return stats;
  }
  {
    const double rnorm = std::sqrt(detail::dot(r, r));
    stats.rel_residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) return stats;
  }

  std::vector<double> z(n), p(n), q(n);
  M(r, z);
  p = z;
  double rz = detail::dot(r, z);

  for (int it = 0; it < max_iter; ++it) {
    A(p, q);
    const double pq = detail::dot(p, q);
    if (!(pq > 0.0)) {
      throw numerical_error(std::string(what) + ": operator lost positive definiteness");
    }
    const double alpha = rz / pq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    const double rnorm = std::sqrt(detail::dot(r, r));
    stats.iterations = it + 1;
    stats.rel_residual = rnorm / bnorm;
    stats.residual_history.push_back(rnorm);
    if (rnorm <= tol * bnorm) return stats;
    M(r, z);
    const double rz_new = detail::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw numerical_error(std::string(what) + ": no convergence in " + std::to_string(max_iter) +
                        " iterations, relative residual " + std::to_string(stats.rel_residual));
}

}  // namespace nemel
