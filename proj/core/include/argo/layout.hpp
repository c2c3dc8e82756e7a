#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "argo/graph.hpp"

namespace argo {

struct LayoutParams {
    double repulsion_strength = 5000.0;
    double spring_length = 120.0;
    double spring_strength = 0.05;
    double gravity = 0.01;
    int iterations = 300;
    double cooling_factor = 0.98;
    std::uint64_t seed = 1;
    double vertical_spacing = 40.0;
    double horizontal_offset = 100.0;

    // Throws Error{invalid_argument}.
    void validate() const;
    bool operator==(const LayoutParams&) const = default;
};

// Minimum pairwise distance used by the force model.
inline constexpr double kMinDistance = 1e-6;

// Column of `count` slots to the right of the parent, centered on parent.y:
// x = parent.x + horizontal_offset, y_i = parent.y + (i - (count - 1) / 2) * vertical_spacing.
std::vector<Point> place_expansion(Point parent, int count, const LayoutParams& params);

// Spot for a freshly seeded paper: the origin for an empty layout, otherwise
// one horizontal_offset right of the rightmost placed node at y = 0.
Point place_seed(const CitationNetwork& network, const LayoutParams& params);

// Deterministic start position for an unplaced node, drawn from a
// splitmix-seeded mt19937_64 stream keyed by (seed, corpus id).
Point initial_position(CorpusId id, const LayoutParams& params);

// Force-directed refinement. Repulsion repulsion_strength / d^2 between every
// pair, Hooke springs toward spring_length on edges, gravity toward the
// centroid. Each iteration moves a node by force * step, capped at
// step * spring_length, then step *= cooling_factor (step starts at 1).
// Pinned nodes and `held` nodes do not move. Returns a location for every node.
std::map<CorpusId, Point> run_layout(const CitationNetwork& network, const LayoutParams& params,
                                     const std::set<CorpusId>& held = {});

// run_layout and write the result back into the network.
void apply_layout(CitationNetwork& network, const LayoutParams& params,
                  const std::set<CorpusId>& held = {});

// Throws Error{unknown_paper}.
void pin(CitationNetwork& network, CorpusId id, bool pinned);

} // namespace argo
