#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace argo {

// Semantic Scholar CorpusID. Valid ids are positive.
enum class CorpusId : std::int64_t {};

constexpr CorpusId corpus_id(std::int64_t value) noexcept { return static_cast<CorpusId>(value); }
constexpr std::int64_t raw(CorpusId id) noexcept { return static_cast<std::int64_t>(id); }

struct Paper {
    CorpusId corpus_id{};
    std::string title;
    std::optional<std::string> abstract;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::int64_t citation_count = 0;
    std::string url;

    bool operator==(const Paper&) const = default;
};

// Throws Error{invalid_paper} on a non-positive id, empty title or negative
// citation count.
void validate(const Paper& paper);

// Directed citing -> cited.
struct CitationEdge {
    CorpusId source{};
    CorpusId target{};

    auto operator<=>(const CitationEdge&) const = default;
};

enum class Direction { references, citations };

std::string_view to_string(Direction direction) noexcept;
// Accepts "references"/"refs" and "citations"/"cites".
std::optional<Direction> parse_direction(std::string_view text) noexcept;

// Ordering applied to linked papers before a batch is taken.
enum class Strategy { upstream_order, citation_count_desc, recency_desc };

std::string_view to_string(Strategy strategy) noexcept;
// Accepts the canonical names plus the short forms "upstream", "citations",
// "citation_count" and "recency".
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

} // namespace argo
