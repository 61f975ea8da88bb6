#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sofent {

// Bad arguments, malformed input, mismatched shapes. CLI maps this to exit 2.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation was rejected before it could exhaust memory or time.
// CLI maps this to exit 3.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense problems above this many matrix entries are refused.
inline constexpr std::uint64_t kDefaultEntryCap = std::uint64_t(1) << 28;

// Brute-force oracles refuse state spaces above this size.
inline constexpr std::uint64_t kOracleStateGuard = std::uint64_t(1) << 20;

inline void check_entry_cap(std::uint64_t rows, std::uint64_t cols,
                            std::uint64_t cap, const char* what) {
  if (rows != 0 && cols > cap / rows)
    throw resource_error(std::string(what) + ": " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " exceeds entry cap " +
                         std::to_string(cap));
}

// Exact nonnegative rational, used for the map-space thresholds.
struct Rational {
  std::int64_t num = 0;
  std::uint64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::uint64_t d) : num(n), den(d) {
    if (den == 0) throw usage_error("rational with zero denominator");
  }

  bool operator==(const Rational&) const = default;
};

// count/total <= r^2, compared exactly in integers.
inline bool fraction_leq_square(std::uint64_t count, std::uint64_t total,
                                const Rational& r) {
  if (r.num < 0) return false;
  unsigned __int128 lhs = (unsigned __int128)count * r.den * r.den;
  unsigned __int128 rhs = (unsigned __int128)total * (std::uint64_t)r.num *
                          (std::uint64_t)r.num;
  return lhs <= rhs;
}

inline bool rational_geq_one(const Rational& r) {
  return r.num >= 0 && (std::uint64_t)r.num >= r.den;
}

// Worker count for ladder evaluation. Single-threaded unless SOFENT_THREADS
// asks for more; results are gathered by index so the count never changes
// any output byte.
inline unsigned worker_count() {
  const char* env = std::getenv("SOFENT_THREADS");
  if (!env) return 1;
  long v = std::strtol(env, nullptr, 10);
  if (v <= 1) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return (unsigned)std::min<long>(v, (long)std::max(hw, 1u) * 4);
}

template <class Fn>
void run_indexed(std::size_t n, Fn&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  // static block split keeps each index owned by exactly one worker
  std::size_t per = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = (std::size_t)w * per;
    std::size_t hi = std::min(n, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace sofent
