#ifndef TWC_TOOLS_CLI_HPP
#define TWC_TOOLS_CLI_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace twc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kPrecondition = 2,
  kNumerical = 3,
};

/// "a:b:n": n evenly spaced points from a to b inclusive; "a" alone is one point.
struct Grid {
  double first = 0.0;
  double last = 0.0;
  long count = 1;

  [[nodiscard]] std::vector<double> values() const;
};

Grid parse_grid(const std::string& text);

/// "2,3,5" or "2:10" (inclusive range), or a mix such as "2,4:6".
std::vector<long> parse_int_list(const std::string& text);

/// f(0..n-1) on a pool of worker threads; results come back in index order.
/// The first exception thrown by any task is rethrown after the pool joins.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Full command line (without the program name). Writes results to `out` or
/// the --out file and diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twc::cli

#endif
