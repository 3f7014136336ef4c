#pragma once

#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace fribm {

using Complex = std::complex<double>;

/// Raised when a numerical procedure fails to meet its contract
/// (eigensolver non-convergence, bracket failure, ambiguous mode
/// classification, ...). The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Precondition violations on user-facing parameters. Exit code 2 in the CLI.
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Filesystem failures while emitting results. Exit code 4 in the CLI.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Worker count for parallel sweeps: FRIBM_WORKERS if set (must be a
/// positive integer), otherwise the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("FRIBM_WORKERS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n <= 0)
      throw config_error("FRIBM_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<int>(n);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(i) for i in [0, n). Results must be written to preallocated,
/// disjoint slots so the merge order is deterministic regardless of the
/// worker count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fribm
