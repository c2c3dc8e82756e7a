#include "argo/rate_limiter.hpp"

#include <algorithm>

#include "argo/error.hpp"

namespace argo {

SlidingWindowLimiter::SlidingWindowLimiter(std::size_t capacity, Duration window)
    : capacity_(capacity), window_(window) {
    if (capacity == 0 || window <= Duration::zero()) {
        throw Error(Errc::invalid_argument, "limiter capacity and window must be positive");
    }
}

// A grant at t occupies [t, t + window).
SlidingWindowLimiter::Decision SlidingWindowLimiter::decide(TimePoint now) const {
    Duration wait{};
    if (now < held_until_) wait = held_until_ - now;

    std::size_t live = 0;
    auto first_live = grants_.end();
    for (auto it = grants_.begin(); it != grants_.end(); ++it) {
        if (now - *it < window_) {
            if (first_live == grants_.end()) first_live = it;
            ++live;
        }
    }
    if (live >= capacity_) {
        // The slot frees when the (live - capacity + 1)-th oldest grant expires.
        auto oldest_blocking = first_live + static_cast<std::ptrdiff_t>(live - capacity_);
        wait = std::max(wait, *oldest_blocking + window_ - now);
    }
    return {wait == Duration::zero(), wait};
}

void SlidingWindowLimiter::prune(TimePoint now) {
    while (!grants_.empty() && now - grants_.front() >= window_) grants_.pop_front();
}

SlidingWindowLimiter::Decision SlidingWindowLimiter::try_acquire(TimePoint now) {
    std::lock_guard lock(mutex_);
    prune(now);
    auto decision = decide(now);
    if (decision.granted) {
        // Keep the log ordered even if callers race with slightly stale clocks.
        auto pos = std::upper_bound(grants_.begin(), grants_.end(), now);
        grants_.insert(pos, now);
    }
    return decision;
}

SlidingWindowLimiter::Decision SlidingWindowLimiter::probe(TimePoint now) const {
    std::lock_guard lock(mutex_);
    return decide(now);
}

void SlidingWindowLimiter::hold_until(TimePoint until) {
    std::lock_guard lock(mutex_);
    held_until_ = std::max(held_until_, until);
}

std::size_t SlidingWindowLimiter::in_window(TimePoint now) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(
        grants_.begin(), grants_.end(), [&](TimePoint t) { return t <= now && now - t < window_; }));
}

} // namespace argo
