#include "argo/graph.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "argo/error.hpp"

namespace argo {

CitationNetwork::CitationNetwork(PageRankParams params) : params_(params) {}

void CitationNetwork::require(CorpusId id) const {
    if (!papers_.contains(id)) {
        throw Error(Errc::unknown_paper, fmt::format("paper {} is not in the network", raw(id)));
    }
}

bool CitationNetwork::add_paper(Paper paper) {
    validate(paper);
    auto id = paper.corpus_id;
    auto [it, inserted] = papers_.insert_or_assign(id, std::move(paper));
    if (inserted) refresh_metrics();
    return inserted;
}

bool CitationNetwork::add_edge(CorpusId source, CorpusId target) {
    if (source == target) {
        throw Error(Errc::self_loop_rejected,
                    fmt::format("self-citation {} -> {} is not allowed", raw(source), raw(target)));
    }
    for (auto id : {source, target}) {
        if (!papers_.contains(id)) {
            throw Error(Errc::missing_endpoint,
                        fmt::format("edge {} -> {}: paper {} is not in the network", raw(source),
                                    raw(target), raw(id)));
        }
    }
    bool inserted = edges_.insert({source, target}).second;
    if (inserted) refresh_metrics();
    return inserted;
}

bool CitationNetwork::remove_edge(CorpusId source, CorpusId target) {
    bool erased = edges_.erase({source, target}) > 0;
    if (erased) refresh_metrics();
    return erased;
}

void CitationNetwork::merge(std::vector<Paper> papers, const std::vector<CitationEdge>& edges) {
    std::set<CorpusId> ids;
    for (const auto& [id, p] : papers_) ids.insert(id);
    for (const auto& p : papers) {
        validate(p);
        ids.insert(p.corpus_id);
    }
    for (const auto& e : edges) {
        if (e.source == e.target) {
            throw Error(Errc::self_loop_rejected,
                        fmt::format("self-citation {} -> {} is not allowed", raw(e.source), raw(e.target)));
        }
        for (auto id : {e.source, e.target}) {
            if (!ids.contains(id)) {
                throw Error(Errc::missing_endpoint,
                            fmt::format("edge {} -> {}: paper {} is not in the network",
                                        raw(e.source), raw(e.target), raw(id)));
            }
        }
    }
    for (auto& p : papers) {
        auto id = p.corpus_id;
        papers_.insert_or_assign(id, std::move(p));
    }
    edges_.insert(edges.begin(), edges.end());
    refresh_metrics();
}

void CitationNetwork::remove_paper(CorpusId id) {
    require(id);
    papers_.erase(id);
    std::erase_if(edges_, [id](const CitationEdge& e) { return e.source == id || e.target == id; });
    locations_.erase(id);
    pinned_.erase(id);
    refresh_metrics();
}

const Paper& CitationNetwork::paper(CorpusId id) const {
    require(id);
    return papers_.at(id);
}

const NodeMetrics& CitationNetwork::metrics(CorpusId id) const {
    require(id);
    return metrics_.at(id);
}

std::optional<Point> CitationNetwork::location(CorpusId id) const {
    require(id);
    if (auto it = locations_.find(id); it != locations_.end()) return it->second;
    return std::nullopt;
}

void CitationNetwork::place(CorpusId id, Point at) {
    require(id);
    if (!std::isfinite(at.x) || !std::isfinite(at.y)) {
        throw Error(Errc::invalid_argument,
                    fmt::format("non-finite location for paper {}", raw(id)));
    }
    locations_[id] = at;
}

bool CitationNetwork::pinned(CorpusId id) const {
    require(id);
    return pinned_.contains(id);
}

void CitationNetwork::set_pinned(CorpusId id, bool pinned) {
    require(id);
    if (pinned) {
        pinned_.insert(id);
    } else {
        pinned_.erase(id);
    }
}

Position CitationNetwork::position(CorpusId id) const {
    auto at = location(id).value_or(Point{});
    return {at.x, at.y, pinned_.contains(id)};
}

void CitationNetwork::set_pagerank_params(PageRankParams params) {
    params_ = params;
    refresh_metrics();
}

void CitationNetwork::refresh_metrics() {
    metrics_.clear();
    if (papers_.empty()) return;
    auto degrees = compute_degrees(*this);
    auto ranks = compute_pagerank(*this, params_);
    for (const auto& [id, d] : degrees) {
        metrics_[id] = NodeMetrics{d.in_degree, d.out_degree, d.degree(), ranks.at(id)};
    }
}

std::map<CorpusId, DegreeRecord> compute_degrees(const CitationNetwork& network) {
    std::map<CorpusId, DegreeRecord> out;
    for (const auto& [id, paper] : network.papers()) out[id];
    for (const auto& e : network.edges()) {
        ++out[e.source].out_degree;
        ++out[e.target].in_degree;
    }
    return out;
}

std::map<CorpusId, double> compute_pagerank(const CitationNetwork& network,
                                            const PageRankParams& params) {
    if (network.empty()) throw Error(Errc::empty_network, "pagerank of an empty network");
    if (!(params.damping > 0.0 && params.damping < 1.0)) {
        throw Error(Errc::invalid_argument,
                    fmt::format("damping must lie in (0, 1), got {}", params.damping));
    }

    const auto& papers = network.papers();
    const std::size_t n = papers.size();
    std::map<CorpusId, std::size_t> index;
    for (const auto& [id, paper] : papers) index.emplace(id, index.size());

    std::vector<std::vector<std::size_t>> out_links(n);
    for (const auto& e : network.edges()) out_links[index.at(e.source)].push_back(index.at(e.target));

    const double inv_n = 1.0 / static_cast<double>(n);
    const double d = params.damping;
    std::vector<double> rank(n, inv_n);
    std::vector<double> next(n);

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (out_links[i].empty()) dangling += rank[i];
        }
        const double base = (1.0 - d) * inv_n + d * dangling * inv_n;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            if (out_links[i].empty()) continue;
            const double share = d * rank[i] / static_cast<double>(out_links[i].size());
            for (auto j : out_links[i]) next[j] += share;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - rank[i]);
        rank.swap(next);
        if (change < params.tolerance) break;
    }

    double total = 0.0;
    for (double r : rank) total += r;
    std::map<CorpusId, double> out;
    for (const auto& [id, i] : index) out.emplace(id, rank[i] / total);
    return out;
}

} // namespace argo
