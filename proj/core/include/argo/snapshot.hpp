#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argo/paper.hpp"
#include "argo/style.hpp"

namespace argo {

inline constexpr int kSnapshotVersion = 1;
inline constexpr std::string_view kSnapshotExtension = ".argoscholar.json";
inline constexpr std::string_view kSnapshotMediaType = "application/json";

struct SnapshotNode {
    Paper paper;
    double x = 0.0;
    double y = 0.0;
    bool pinned = false;

    bool operator==(const SnapshotNode&) const = default;
};

// Expansion progress for one (paper, direction) listing.
struct SnapshotCursor {
    CorpusId corpus_id{};
    Direction direction = Direction::references;
    int offset = 0;
    Strategy strategy = Strategy::upstream_order;

    bool operator==(const SnapshotCursor&) const = default;
};

struct Snapshot {
    int version = kSnapshotVersion;
    std::string name;
    std::chrono::sys_seconds created_at{};
    std::vector<SnapshotNode> nodes;
    std::vector<CitationEdge> edges;
    StyleConfig style;
    std::vector<SnapshotCursor> cursors;

    bool operator==(const Snapshot&) const = default;
};

struct LoadedSnapshot {
    Snapshot snapshot;
    std::vector<std::string> warnings;  // one per ignored unknown field, by path
};

// Checks every document invariant. Throws Error{unsupported_version} or
// Error{invalid_snapshot}; detail() holds the path of the offending element,
// e.g. "edges[2]" or "nodes[0].title".
void validate(const Snapshot& snapshot);

// Sorted nodes (by id), edges (by source, target) and cursors (by id,
// direction); reals rounded to the 6-decimal precision used on disk.
Snapshot canonicalize(Snapshot snapshot);

// Canonical UTF-8 JSON: sorted object keys, sorted collections, reals with
// exactly 6 decimals, 2-space indentation, trailing newline. Validates first.
std::string serialize(const Snapshot& snapshot);

// Parses, validates and canonicalizes. Unknown fields are ignored and listed
// in warnings. Throws Error{parse_error} (detail "byte N"),
// Error{unsupported_version} or Error{invalid_snapshot}.
LoadedSnapshot deserialize(std::string_view text);

// Round trip through the on-disk 6-decimal text form.
double quantize(double value);

// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(std::chrono::sys_seconds t);
std::optional<std::chrono::sys_seconds> parse_timestamp(std::string_view text);

} // namespace argo
