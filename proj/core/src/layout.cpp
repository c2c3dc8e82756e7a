#include "argo/layout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "argo/error.hpp"

namespace argo {

void LayoutParams::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::invalid_argument, what); };
    if (iterations < 0) fail(fmt::format("iterations must be >= 0, got {}", iterations));
    if (!(cooling_factor > 0.0 && cooling_factor < 1.0)) {
        fail(fmt::format("cooling_factor must lie in (0, 1), got {}", cooling_factor));
    }
    if (!(vertical_spacing > 0.0)) fail("vertical_spacing must be > 0");
    if (!(horizontal_offset > 0.0)) fail("horizontal_offset must be > 0");
    if (!(spring_length > 0.0)) fail("spring_length must be > 0");
    for (double v : {repulsion_strength, spring_strength, gravity}) {
        if (!std::isfinite(v) || v < 0.0) fail("force strengths must be finite and >= 0");
    }
}

std::vector<Point> place_expansion(Point parent, int count, const LayoutParams& params) {
    if (count < 1) throw Error(Errc::invalid_argument, "place_expansion needs count >= 1");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    const double x = parent.x + params.horizontal_offset;
    const double center = static_cast<double>(count - 1) / 2.0;
    for (int i = 0; i < count; ++i) {
        out.push_back({x, parent.y + (static_cast<double>(i) - center) * params.vertical_spacing});
    }
    return out;
}

Point place_seed(const CitationNetwork& network, const LayoutParams& params) {
    const auto& locations = network.locations();
    if (locations.empty()) return {};
    double right = locations.begin()->second.x;
    for (const auto& [id, p] : locations) right = std::max(right, p.x);
    return {right + params.horizontal_offset, 0.0};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// mt19937_64 output is fully specified, unlike the std distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

Point initial_position(CorpusId id, const LayoutParams& params) {
    std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(static_cast<std::uint64_t>(raw(id)))));
    const double extent = params.spring_length * 2.0;
    double x = (unit(rng) * 2.0 - 1.0) * extent;
    double y = (unit(rng) * 2.0 - 1.0) * extent;
    return {x, y};
}

std::map<CorpusId, Point> run_layout(const CitationNetwork& network, const LayoutParams& params,
                                     const std::set<CorpusId>& held) {
    params.validate();
    const auto& papers = network.papers();
    const std::size_t n = papers.size();

    std::vector<CorpusId> ids;
    std::vector<Point> pos;
    std::vector<bool> fixed;
    std::map<CorpusId, std::size_t> index;
    ids.reserve(n);
    for (const auto& [id, paper] : papers) {
        index.emplace(id, ids.size());
        ids.push_back(id);
        pos.push_back(network.location(id).value_or(initial_position(id, params)));
        fixed.push_back(network.pinned(id) || held.contains(id));
    }
    std::vector<std::pair<std::size_t, std::size_t>> springs;
    for (const auto& e : network.edges()) springs.emplace_back(index.at(e.source), index.at(e.target));

    std::vector<Point> force(n);
    double step = 1.0;
    for (int iter = 0; iter < params.iterations; ++iter) {
        std::fill(force.begin(), force.end(), Point{});

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = pos[j].x - pos[i].x;
                double dy = pos[j].y - pos[i].y;
                double dist = std::hypot(dx, dy);
                double ux = 1.0, uy = 0.0;  // coincident: separate along x by index order
                if (dist > 0.0) {
                    ux = dx / dist;
                    uy = dy / dist;
                }
                dist = std::max(dist, kMinDistance);
                double f = params.repulsion_strength / (dist * dist);
                force[i].x -= f * ux;
                force[i].y -= f * uy;
                force[j].x += f * ux;
                force[j].y += f * uy;
            }
        }

        for (auto [s, t] : springs) {
            double dx = pos[t].x - pos[s].x;
            double dy = pos[t].y - pos[s].y;
            double dist = std::max(std::hypot(dx, dy), kMinDistance);
            double f = params.spring_strength * (dist - params.spring_length);
            double fx = f * dx / dist;
            double fy = f * dy / dist;
            force[s].x += fx;
            force[s].y += fy;
            force[t].x -= fx;
            force[t].y -= fy;
        }

        if (n > 0) {
            Point centroid;
            for (const auto& p : pos) {
                centroid.x += p.x;
                centroid.y += p.y;
            }
            centroid.x /= static_cast<double>(n);
            centroid.y /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                force[i].x += params.gravity * (centroid.x - pos[i].x);
                force[i].y += params.gravity * (centroid.y - pos[i].y);
            }
        }

        const double cap = step * params.spring_length;
        for (std::size_t i = 0; i < n; ++i) {
            if (fixed[i]) continue;
            double mx = force[i].x * step;
            double my = force[i].y * step;
            double len = std::hypot(mx, my);
            if (!std::isfinite(len)) continue;
            if (len > cap) {
                mx *= cap / len;
                my *= cap / len;
            }
            pos[i].x += mx;
            pos[i].y += my;
        }
        step *= params.cooling_factor;
    }

    std::map<CorpusId, Point> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace(ids[i], pos[i]);
    return out;
}

void apply_layout(CitationNetwork& network, const LayoutParams& params,
                  const std::set<CorpusId>& held) {
    for (const auto& [id, p] : run_layout(network, params, held)) network.place(id, p);
}

void pin(CitationNetwork& network, CorpusId id, bool pinned) { network.set_pinned(id, pinned); }

} // namespace argo
