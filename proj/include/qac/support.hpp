#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace qac {

/// Kahan-Babuska (Neumaier) compensated accumulator.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error (sample std / sqrt(n)) with compensated sums, in
/// the given element order.
template <class Range>
MeanStderr mean_stderr(const Range& xs) {
  MeanStderr out;
  CompensatedSum s;
  for (double x : xs) {
    s.add(x);
    ++out.n;
  }
  if (out.n == 0)
    return out;
  out.mean = s.value() / static_cast<double>(out.n);
  if (out.n > 1) {
    CompensatedSum v;
    for (double x : xs)
      v.add((x - out.mean) * (x - out.mean));
    out.stderr_ = std::sqrt(v.value() / static_cast<double>(out.n - 1)) /
                  std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

/// Worker budget: QAC_THREADS if set, else the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("QAC_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0)
      return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Tasks write into
/// index-addressed slots, so results never depend on the schedule. If tasks
/// throw, the exception from the lowest index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0)
    return;
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4)
    s[i] = digits[v & 0xf];
  return s;
}

} // namespace qac
