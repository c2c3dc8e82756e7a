#include "argo/sessions.hpp"

#include <array>

#include <openssl/rand.h>

namespace argo {

std::string random_token() {
    static constexpr std::string_view alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    std::array<unsigned char, 16> bytes{};
    if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
        throw Error(Errc::storage_error, "no entropy for a session token");
    }
    std::string out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (auto b : bytes) {
        acc = (acc << 8) | b;
        bits += 8;
        while (bits >= 6) {
            bits -= 6;
            out += alphabet[(acc >> bits) & 0x3f];
        }
    }
    if (bits > 0) out += alphabet[(acc << (6 - bits)) & 0x3f];
    return out;
}

SessionManager::SessionManager(std::chrono::seconds idle_ttl, std::function<Clock::time_point()> now)
    : ttl_(idle_ttl), now_(std::move(now)) {
    if (!now_) now_ = [] { return Clock::now(); };
}

std::string SessionManager::create(SessionState initial) {
    auto session = std::make_shared<Session>();
    session->state = std::move(initial);
    session->last_touched = now_();
    std::lock_guard lock(mutex_);
    auto id = random_token();
    while (sessions_.contains(id)) id = random_token();
    sessions_.emplace(id, std::move(session));
    return id;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    auto t = now_();
    if (it != sessions_.end() && t - it->second->last_touched > ttl_) {
        sessions_.erase(it);
        it = sessions_.end();
    }
    if (it == sessions_.end()) throw Error(Errc::unknown_session, "no such session", id);
    it->second->last_touched = t;
    return it->second;
}

SessionState SessionManager::read(const std::string& id) {
    auto session = find(id);
    std::shared_lock r(session->state_mutex);
    return session->state;
}

void SessionManager::commit(Session& session, SessionState&& state) {
    std::unique_lock w(session.state_mutex);
    session.state = std::move(state);
}

bool SessionManager::erase(const std::string& id) {
    std::lock_guard lock(mutex_);
    return sessions_.erase(id) > 0;
}

std::size_t SessionManager::sweep() {
    std::lock_guard lock(mutex_);
    auto t = now_();
    return std::erase_if(sessions_, [&](const auto& kv) { return t - kv.second->last_touched > ttl_; });
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

} // namespace argo
