#include "argo/paper.hpp"

#include <fmt/format.h>

#include "argo/error.hpp"

namespace argo {

void validate(const Paper& paper) {
    if (raw(paper.corpus_id) <= 0) {
        throw Error(Errc::invalid_paper,
                    fmt::format("corpus_id must be positive, got {}", raw(paper.corpus_id)));
    }
    if (paper.title.empty()) {
        throw Error(Errc::invalid_paper,
                    fmt::format("paper {} has an empty title", raw(paper.corpus_id)));
    }
    if (paper.citation_count < 0) {
        throw Error(Errc::invalid_paper,
                    fmt::format("paper {} has negative citation_count", raw(paper.corpus_id)));
    }
}

std::string_view to_string(Direction direction) noexcept {
    return direction == Direction::references ? "references" : "citations";
}

std::optional<Direction> parse_direction(std::string_view text) noexcept {
    if (text == "references" || text == "refs") return Direction::references;
    if (text == "citations" || text == "cites") return Direction::citations;
    return std::nullopt;
}

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
    case Strategy::upstream_order: return "upstream_order";
    case Strategy::citation_count_desc: return "citation_count_desc";
    case Strategy::recency_desc: return "recency_desc";
    }
    return "upstream_order";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept {
    if (text == "upstream_order" || text == "upstream") return Strategy::upstream_order;
    if (text == "citation_count_desc" || text == "citation_count" || text == "citations") {
        return Strategy::citation_count_desc;
    }
    if (text == "recency_desc" || text == "recency") return Strategy::recency_desc;
    return std::nullopt;
}

} // namespace argo
