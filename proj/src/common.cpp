#include "nemel/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nemel {

namespace {

int read_thread_env() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const char* env = std::getenv("NEMEL_THREADS");
  if (env == nullptr) return hw;
  const int requested = std::atoi(env);
  if (requested <= 0) return hw;
  return std::min(requested, hw);
}

// Chunk size fixed independently of the thread count so that work
// partitioning never influences results.
constexpr std::size_t kChunk = 8192;

}  // namespace

int thread_count() {
  static const int n = read_thread_env();
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  const int nthreads = std::min<std::size_t>(thread_count(), nchunks);
  if (nthreads <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(nthreads));
  // Static cyclic assignment of chunks to workers; writes are disjoint by contract.
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&, t]() {
      for (std::size_t c = static_cast<std::size_t>(t); c < nchunks;
           c += static_cast<std::size_t>(nthreads)) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(begin + kChunk, n);
        body(begin, end);
      }
    });
  }
  for (auto& w : workers) w.join();
}

double det_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double det_max(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

double det_min(std::span<const double> v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

double det_max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace nemel
