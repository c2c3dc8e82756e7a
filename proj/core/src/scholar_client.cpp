#include "argo/scholar_client.hpp"

#include <charconv>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "argo/error.hpp"

namespace argo {

using nlohmann::json;

namespace {

std::chrono::seconds ceil_seconds(SlidingWindowLimiter::Duration d) {
    auto s = std::chrono::ceil<std::chrono::seconds>(d);
    return std::max(s, std::chrono::seconds(1));
}

[[noreturn]] void malformed(const std::string& what) {
    throw Error(Errc::malformed_response, "malformed upstream response: " + what);
}

std::optional<std::int64_t> corpus_id_of(const json& obj) {
    if (auto it = obj.find("corpusId"); it != obj.end() && it->is_number_integer()) {
        return it->get<std::int64_t>();
    }
    if (auto ext = obj.find("externalIds"); ext != obj.end() && ext->is_object()) {
        if (auto it = ext->find("CorpusId"); it != ext->end()) {
            if (it->is_number_integer()) return it->get<std::int64_t>();
            if (it->is_string()) {
                const auto& text = it->get_ref<const std::string&>();
                std::int64_t v = 0;
                auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec == std::errc{} && ptr == text.data() + text.size()) return v;
            }
        }
    }
    return std::nullopt;
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) malformed(fmt::format("'{}' is not a string", key));
    auto value = it->get<std::string>();
    if (value.empty()) return std::nullopt;
    return value;
}

std::optional<int> optional_int(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) malformed(fmt::format("'{}' is not an integer", key));
    return it->get<int>();
}

std::optional<PaperSummary> parse_summary(const json& obj) {
    if (!obj.is_object()) malformed("linked paper is not an object");
    auto id = corpus_id_of(obj);
    if (!id || *id <= 0) return std::nullopt;
    PaperSummary s;
    s.corpus_id = corpus_id(*id);
    s.title = optional_string(obj, "title").value_or("");
    s.year = optional_int(obj, "year");
    s.citation_count = optional_int(obj, "citationCount").value_or(0);
    return s;
}

json parse_json(std::string_view body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) malformed("body is not a JSON object");
    return doc;
}

} // namespace

PaperRecord parse_paper_record(std::string_view body) {
    json doc = parse_json(body);
    PaperRecord rec;
    auto id = corpus_id_of(doc);
    if (!id || *id <= 0) malformed("paper without corpusId");
    auto& p = rec.paper;
    p.corpus_id = corpus_id(*id);
    p.title = optional_string(doc, "title").value_or("");
    if (p.title.empty()) malformed(fmt::format("paper {} has no title", *id));
    p.abstract = optional_string(doc, "abstract");
    p.year = optional_int(doc, "year");
    p.venue = optional_string(doc, "venue");
    p.citation_count = std::max<std::int64_t>(0, optional_int(doc, "citationCount").value_or(0));
    if (auto it = doc.find("authors"); it != doc.end() && it->is_array()) {
        for (const auto& a : *it) {
            if (a.is_object() && a.contains("name") && a["name"].is_string()) {
                p.authors.push_back(a["name"].get<std::string>());
            }
        }
    }
    if (auto url = optional_string(doc, "url")) {
        p.url = *url;
    } else if (auto pid = optional_string(doc, "paperId")) {
        p.url = "https://www.semanticscholar.org/paper/" + *pid;
    } else {
        p.url = fmt::format("https://api.semanticscholar.org/CorpusID:{}", *id);
    }

    auto collect = [&](const char* key, std::vector<CorpusId>& ids) {
        auto it = doc.find(key);
        if (it == doc.end() || it->is_null()) return;
        if (!it->is_array()) malformed(fmt::format("'{}' is not an array", key));
        std::set<CorpusId> seen;
        for (const auto& item : *it) {
            auto s = parse_summary(item);
            if (!s || s->corpus_id == p.corpus_id || !seen.insert(s->corpus_id).second) continue;
            ids.push_back(s->corpus_id);
            rec.linked.emplace(s->corpus_id, *s);
        }
    };
    collect("references", rec.reference_ids);
    collect("citations", rec.citation_ids);
    return rec;
}

LinkedPage parse_linked_page(std::string_view body, Direction direction) {
    json doc = parse_json(body);
    const char* key = direction == Direction::references ? "citedPaper" : "citingPaper";
    LinkedPage page;
    page.offset = optional_int(doc, "offset").value_or(0);
    page.next = optional_int(doc, "next");
    auto data = doc.find("data");
    if (data == doc.end() || !data->is_array()) malformed("page without 'data' array");
    page.upstream_count = static_cast<int>(data->size());
    std::set<CorpusId> seen;
    for (const auto& entry : *data) {
        if (!entry.is_object() || !entry.contains(key)) malformed(fmt::format("entry without '{}'", key));
        auto s = parse_summary(entry[key]);
        if (s && seen.insert(s->corpus_id).second) page.items.push_back(std::move(*s));
    }
    return page;
}

ScholarClient::ScholarClient(std::shared_ptr<Transport> transport, ClientOptions options,
                             ClientClock clock)
    : transport_(std::move(transport)),
      options_(options),
      clock_(std::move(clock)),
      limiter_(options.limiter_capacity, options.limiter_window) {
    if (!transport_) throw Error(Errc::invalid_argument, "scholar client needs a transport");
    if (!clock_.now) clock_.now = [] { return SlidingWindowLimiter::Clock::now(); };
    if (!clock_.sleep) clock_.sleep = [](auto d) { std::this_thread::sleep_for(d); };
    if (options_.max_attempts < 1) options_.max_attempts = 1;
}

void ScholarClient::take_slot() {
    for (;;) {
        auto decision = limiter_.try_acquire(clock_.now());
        if (decision.granted) return;
        if (!options_.block_on_limit) {
            auto wait = ceil_seconds(decision.wait);
            throw Error(Errc::rate_limited,
                        fmt::format("local rate limit of {} requests per {}s reached; retry in {}s",
                                    limiter_.capacity(), options_.limiter_window.count(),
                                    wait.count()))
                .with_retry_after(wait);
        }
        clock_.sleep(decision.wait);
    }
}

std::string ScholarClient::fetch_body(const ApiRequest& request) {
    int failures = 0;
    std::string last_problem;
    std::chrono::seconds hint = options_.default_backoff;
    for (;;) {
        take_slot();
        ++requests_sent_;
        std::optional<ApiResponse> response;
        try {
            response = transport_->send(request);
        } catch (const TransportFailure& e) {
            last_problem = e.what();
        }

        if (response) {
            if (response->status >= 200 && response->status < 300) return std::move(response->body);
            if (response->status == 404) {
                throw Error(Errc::not_found,
                            fmt::format("CorpusID {} not found upstream", raw(request.id)),
                            request.fixture_name());
            }
            if (response->status == 429) {
                hint = response->retry_after.value_or(options_.default_backoff);
                limiter_.hold_until(clock_.now() + hint);
                last_problem = "upstream returned 429";
                if (++failures >= options_.max_attempts) break;
                if (!options_.block_on_limit) {
                    throw Error(Errc::rate_limited, "upstream rate limit reached",
                                request.fixture_name())
                        .with_retry_after(hint);
                }
                continue;  // take_slot() waits out the hold
            }
            if (response->status < 500) {
                throw Error(Errc::upstream_error,
                            fmt::format("upstream answered {} for {}", response->status,
                                        request.fixture_name()),
                            response->body);
            }
            last_problem = fmt::format("upstream returned {}", response->status);
            hint = response->retry_after.value_or(options_.default_backoff);
        }

        if (++failures >= options_.max_attempts) break;
        clock_.sleep(hint * (1 << (failures - 1)));
    }
    throw Error(Errc::upstream_error,
                fmt::format("{} after {} attempts", last_problem, failures), request.fixture_name())
        .with_retry_after(hint);
}

std::optional<ScholarClient::Cached> ScholarClient::cached(const ApiRequest& request) const {
    if (!options_.cache) return std::nullopt;
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(request); it != cache_.end()) return it->second;
    return std::nullopt;
}

void ScholarClient::remember(const ApiRequest& request, Cached value) {
    if (!options_.cache) return;
    std::lock_guard lock(cache_mutex_);
    cache_.insert_or_assign(request, std::move(value));
}

void ScholarClient::clear_cache() {
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
}

PaperRecord ScholarClient::fetch_paper(CorpusId id) {
    if (raw(id) <= 0) {
        throw Error(Errc::invalid_argument, fmt::format("CorpusID must be positive, got {}", raw(id)));
    }
    ApiRequest request{Endpoint::paper, id, 0, 0};
    if (auto hit = cached(request)) return std::get<PaperRecord>(*hit);
    auto record = parse_paper_record(fetch_body(request));
    if (record.paper.corpus_id != id) {
        malformed(fmt::format("asked for CorpusID {}, got {}", raw(id), raw(record.paper.corpus_id)));
    }
    remember(request, record);
    return record;
}

LinkedPage ScholarClient::fetch_linked(CorpusId id, Direction direction, int limit, int offset) {
    if (raw(id) <= 0) {
        throw Error(Errc::invalid_argument, fmt::format("CorpusID must be positive, got {}", raw(id)));
    }
    if (limit < 1 || offset < 0) {
        throw Error(Errc::invalid_argument,
                    fmt::format("need limit >= 1 and offset >= 0, got limit={} offset={}", limit, offset));
    }
    ApiRequest request{direction == Direction::references ? Endpoint::references : Endpoint::citations,
                       id, offset, limit};
    if (auto hit = cached(request)) return std::get<LinkedPage>(*hit);
    auto page = parse_linked_page(fetch_body(request), direction);
    if (static_cast<int>(page.items.size()) > limit) page.items.resize(static_cast<std::size_t>(limit));
    remember(request, page);
    return page;
}

LinkedPage ScholarClient::fetch_references(CorpusId id, int limit, int offset) {
    return fetch_linked(id, Direction::references, limit, offset);
}

LinkedPage ScholarClient::fetch_citations(CorpusId id, int limit, int offset) {
    return fetch_linked(id, Direction::citations, limit, offset);
}

} // namespace argo
