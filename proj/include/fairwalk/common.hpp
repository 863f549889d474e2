// Copyright 2026 The fairwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace fairwalk {

using NodeId = std::uint32_t;

// Base of every error the library throws. `stage()` names the pipeline stage
// once the harness has wrapped the error, and is empty otherwise.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string stage = {})
      : std::runtime_error(stage.empty() ? what : "[" + stage + "] " + what),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Seeding.
//
// Every stochastic stage draws from its own generator whose seed is a mix of
// the master seed and a stage tag (plus node / walk / fold indices). The mix
// is the splitmix64 finalizer, so neighbouring indices give unrelated streams
// and results never depend on how work is scheduled across threads.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, used to turn stage names into seed tags.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) noexcept {
  return splitmix64(base ^ splitmix64(a));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  return derive_seed(derive_seed(base, a), b);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept {
  return derive_seed(base, tag_hash(tag));
}

// mt19937_64 with portable conversions. The std distributions are
// implementation-defined, so uniform reals, bounded integers and shuffles are
// done here to keep outputs identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Draws an index from unnormalized non-negative scores. Returns scores.size()
// when every score is zero.
inline std::size_t sample_index(std::span<const double> scores, Rng& rng) {
  double total = 0.0;
  for (double s : scores) total += s;
  if (!(total > 0.0)) return scores.size();
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] <= 0.0) continue;
    acc += scores[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;  // rounding at the top end
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must not
// depend on execution order. The first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::min<unsigned>(resolve_threads(threads),
                               static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fairwalk
