#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace nemel {

/// Bad user input: config files, CLI arguments, physically invalid parameters.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure at runtime: solver divergence, positivity loss, instability.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Intra-step worker count: min(NEMEL_THREADS, hardware). Read once per process.
int thread_count();

/// Runs body(begin, end) over fixed-size chunks of [0, n). The chunk grid does
/// not depend on the thread count, so disjoint-write kernels are bit-stable
/// under any NEMEL_THREADS setting. Reductions must not be done through this;
/// use the det_* helpers below.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// Deterministic reductions: plain serial order, independent of thread count.
double det_sum(std::span<const double> v);
double det_max(std::span<const double> v);
double det_min(std::span<const double> v);
double det_max_abs(std::span<const double> v);

}  // namespace nemel
