#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "argo/paper.hpp"
#include "argo/rate_limiter.hpp"
#include "argo/transport.hpp"

namespace argo {

// Compact view of a linked paper as returned by the list endpoints.
struct PaperSummary {
    CorpusId corpus_id{};
    std::string title;
    std::optional<int> year;
    std::int64_t citation_count = 0;

    bool operator==(const PaperSummary&) const = default;
};

struct PaperRecord {
    Paper paper;
    std::vector<CorpusId> reference_ids;
    std::vector<CorpusId> citation_ids;
    std::map<CorpusId, PaperSummary> linked;  // one entry per id above

    bool operator==(const PaperRecord&) const = default;
};

// One page of a references/citations listing in upstream order. Linked
// papers without a CorpusID are dropped from `items`; `next` is the upstream
// offset of the following page and is empty once the listing is exhausted.
struct LinkedPage {
    int offset = 0;
    int upstream_count = 0;  // entries on the upstream page, unresolved ones included
    std::vector<PaperSummary> items;
    std::optional<int> next;

    bool exhausted() const noexcept { return !next.has_value(); }
    int next_offset() const noexcept { return next.value_or(offset + upstream_count); }
    bool operator==(const LinkedPage&) const = default;
};

struct ClientOptions {
    std::size_t limiter_capacity = 100;
    std::chrono::seconds limiter_window{300};
    bool cache = true;
    // Sleep until a slot frees instead of failing with Errc::rate_limited.
    bool block_on_limit = false;
    // Consecutive upstream failures (429, 5xx, transport) before giving up.
    int max_attempts = 3;
    std::chrono::seconds default_backoff{2};
};

// Injection points for tests; defaults use steady_clock and this_thread::sleep_for.
struct ClientClock {
    std::function<SlidingWindowLimiter::TimePoint()> now;
    std::function<void(SlidingWindowLimiter::Duration)> sleep;
};

// Semantic Scholar client with a process-wide sliding-window limiter and a
// session-scoped response cache keyed by (endpoint, id, limit, offset).
// Safe to share between threads.
class ScholarClient {
public:
    explicit ScholarClient(std::shared_ptr<Transport> transport, ClientOptions options = {},
                           ClientClock clock = {});

    PaperRecord fetch_paper(CorpusId id);
    LinkedPage fetch_references(CorpusId id, int limit, int offset);
    LinkedPage fetch_citations(CorpusId id, int limit, int offset);
    LinkedPage fetch_linked(CorpusId id, Direction direction, int limit, int offset);

    // Requests handed to the transport, retries included.
    std::size_t requests_sent() const noexcept { return requests_sent_.load(); }

    SlidingWindowLimiter& limiter() noexcept { return limiter_; }
    const ClientOptions& options() const noexcept { return options_; }
    void clear_cache();

private:
    using Cached = std::variant<PaperRecord, LinkedPage>;

    std::string fetch_body(const ApiRequest& request);
    void take_slot();
    std::optional<Cached> cached(const ApiRequest& request) const;
    void remember(const ApiRequest& request, Cached value);

    std::shared_ptr<Transport> transport_;
    ClientOptions options_;
    ClientClock clock_;
    SlidingWindowLimiter limiter_;
    std::atomic<std::size_t> requests_sent_{0};

    mutable std::mutex cache_mutex_;
    std::map<ApiRequest, Cached> cache_;
};

// Parsers for Graph API bodies; throw Error{malformed_response}.
PaperRecord parse_paper_record(std::string_view body);
LinkedPage parse_linked_page(std::string_view body, Direction direction);

} // namespace argo
