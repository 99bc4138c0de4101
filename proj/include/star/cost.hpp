#pragma once

#include <atomic>
#include <cstdint>

namespace star {

enum class EncoderKind { Siamese, Cross };

// Call and quadratic-cost accounting for encoder forwards. Each call of
// sequence length n adds n^2 to the squared-length accumulator of its kind.
struct CostCounter {
  std::atomic<uint64_t> siamese_calls{0};
  std::atomic<uint64_t> cross_calls{0};
  std::atomic<uint64_t> siamese_sq{0};
  std::atomic<uint64_t> cross_sq{0};

  void record(EncoderKind kind, int n) {
    uint64_t sq = static_cast<uint64_t>(n) * static_cast<uint64_t>(n);
    if (kind == EncoderKind::Siamese) {
      siamese_calls.fetch_add(1, std::memory_order_relaxed);
      siamese_sq.fetch_add(sq, std::memory_order_relaxed);
    } else {
      cross_calls.fetch_add(1, std::memory_order_relaxed);
      cross_sq.fetch_add(sq, std::memory_order_relaxed);
    }
  }

  uint64_t encoder_calls() const { return siamese_calls + cross_calls; }

  CostCounter() = default;
  CostCounter(const CostCounter& o)
      : siamese_calls(o.siamese_calls.load()),
        cross_calls(o.cross_calls.load()),
        siamese_sq(o.siamese_sq.load()),
        cross_sq(o.cross_sq.load()) {}
  CostCounter& operator=(const CostCounter& o) {
    siamese_calls = o.siamese_calls.load();
    cross_calls = o.cross_calls.load();
    siamese_sq = o.siamese_sq.load();
    cross_sq = o.cross_sq.load();
    return *this;
  }
};

}  // namespace star
