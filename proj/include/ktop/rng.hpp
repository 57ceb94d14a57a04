#pragma once

#include <cstdint>

namespace ktop {

// Counter-based stream (Philox 4x32-10).  A stream is identified by
// (seed, stream_index) and produces the same variate sequence no matter
// which thread consumes it or how work is partitioned, so per-realization
// streams make ensemble runs independent of the worker count.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform on [-1/2, 1/2): mean 0, variance 1/12.
    double uniform_symmetric() { return uniform01() - 0.5; }

    /// Standard normal via Box-Muller (second variate cached).
    double gaussian();

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n);

  private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;     // low half of the 128-bit counter
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int avail_ = 0;               // unread 32-bit lanes in out_
    double cached_gauss_ = 0.0;
    bool has_cached_gauss_ = false;
};

} // namespace ktop
