#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "argo/error.hpp"
#include "argo/explore.hpp"
#include "argo/layout.hpp"

namespace argo {

// Server-side exploration state behind the session API.
struct SessionState {
    Exploration exploration;
    LayoutParams layout;
};

class SessionManager {
public:
    using Clock = std::chrono::steady_clock;

    explicit SessionManager(std::chrono::seconds idle_ttl = std::chrono::hours(2),
                            std::function<Clock::time_point()> now = {});

    std::string create(SessionState initial);

    // Copy of the current state. Throws Error{unknown_session}.
    SessionState read(const std::string& id);

    // Runs `fn` against a private copy of the state and commits the copy only
    // if fn returns normally. A second writer arriving while one is in flight
    // fails fast with Error{busy} instead of queueing; readers never block on
    // a writer's upstream calls.
    template <class Fn>
    auto mutate(const std::string& id, Fn&& fn) {
        auto session = find(id);
        std::unique_lock writer(session->write, std::try_to_lock);
        if (!writer.owns_lock()) {
            throw Error(Errc::busy, "another change to this session is in progress", id);
        }
        SessionState draft;
        {
            std::shared_lock r(session->state_mutex);
            draft = session->state;
        }
        if constexpr (std::is_void_v<decltype(fn(draft))>) {
            fn(draft);
            commit(*session, std::move(draft));
        } else {
            auto result = fn(draft);
            commit(*session, std::move(draft));
            return result;
        }
    }

    bool erase(const std::string& id);

    // Drops sessions idle for longer than the TTL; returns how many went.
    std::size_t sweep();
    std::size_t size() const;

private:
    struct Session {
        std::mutex write;
        std::shared_mutex state_mutex;
        SessionState state;
        Clock::time_point last_touched;
    };

    std::shared_ptr<Session> find(const std::string& id);
    void commit(Session& session, SessionState&& state);

    std::chrono::seconds ttl_;
    std::function<Clock::time_point()> now_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// 128 random bits, base64url.
std::string random_token();

} // namespace argo
