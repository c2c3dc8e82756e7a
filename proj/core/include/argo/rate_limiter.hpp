#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <mutex>

namespace argo {

// Sliding-window log limiter: at most `capacity` grants inside any half-open
// interval of length `window`. Time is passed in explicitly so the limiter
// can be driven by a simulated clock.
class SlidingWindowLimiter {
public:
    using Clock = std::chrono::steady_clock;
    using TimePoint = Clock::time_point;
    using Duration = Clock::duration;

    struct Decision {
        bool granted = false;
        Duration wait{};  // zero when granted
    };

    explicit SlidingWindowLimiter(std::size_t capacity = 100,
                                  Duration window = std::chrono::seconds(300));

    // Records a grant when one is available, otherwise reports the minimal
    // wait until a slot frees up.
    Decision try_acquire(TimePoint now);

    // Same answer as try_acquire without recording anything.
    Decision probe(TimePoint now) const;

    // Refuse all grants before `until` (upstream asked us to back off).
    void hold_until(TimePoint until);

    std::size_t in_window(TimePoint now) const;
    std::size_t capacity() const noexcept { return capacity_; }
    Duration window() const noexcept { return window_; }

private:
    Decision decide(TimePoint now) const;
    void prune(TimePoint now);

    mutable std::mutex mutex_;
    std::size_t capacity_;
    Duration window_;
    std::deque<TimePoint> grants_;
    TimePoint held_until_{};
};

} // namespace argo
