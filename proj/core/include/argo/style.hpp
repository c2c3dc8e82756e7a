#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "argo/graph.hpp"

namespace argo {

enum class NodeAttribute { citation_count, degree, in_degree, pagerank, year };

std::string_view to_string(NodeAttribute attribute) noexcept;
std::optional<NodeAttribute> parse_node_attribute(std::string_view text) noexcept;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    // "#RRGGBB", either case.
    static std::optional<Rgb> parse(std::string_view hex) noexcept;
    // Lower-case "#rrggbb".
    std::string hex() const;
    bool operator==(const Rgb&) const = default;
};

struct Interval {
    double min = 0.0;
    double max = 0.0;

    bool operator==(const Interval&) const = default;
};

// Attribute -> visual mappings the user can adjust.
struct StyleConfig {
    NodeAttribute color_attribute = NodeAttribute::citation_count;
    Interval color_domain{0.0, 1000.0};
    std::array<Rgb, 2> color_range{Rgb{0xc6, 0xdb, 0xef}, Rgb{0x08, 0x30, 0x6b}};
    NodeAttribute size_attribute = NodeAttribute::citation_count;
    Interval size_domain{0.0, 1000.0};
    Interval size_range{3.0, 15.0};
    bool show_labels = true;
    int label_max_chars = 40;
    bool show_edge_direction = true;

    bool operator==(const StyleConfig&) const = default;
};

// Throws Error{invalid_argument} naming the offending field.
void validate(const StyleConfig& style);

bool degenerate(Interval domain) noexcept;

// lo + (clamp(value) - min) / (max - min) * (hi - lo). A degenerate domain
// (min == max) maps to the midpoint of the range; callers that need to warn
// check degenerate(domain). Throws Error{invalid_argument} if min > max.
double apply_style(double value, Interval domain, Interval range);

// Same map applied per RGB channel, rounded to the nearest integer.
Rgb apply_color(double value, Interval domain, Rgb lo, Rgb hi);

// Attribute value for a node; a missing year reads as the domain minimum
// supplied by the caller.
double attribute_value(const Paper& paper, const NodeMetrics& metrics, NodeAttribute attribute,
                       double missing = 0.0);

// Display label: the title cut to label_max_chars code points, with "…"
// appended when cut.
std::string truncate_label(std::string_view title, int max_chars);

} // namespace argo
