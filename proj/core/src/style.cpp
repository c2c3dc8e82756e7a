#include "argo/style.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "argo/error.hpp"

namespace argo {

std::string_view to_string(NodeAttribute attribute) noexcept {
    switch (attribute) {
    case NodeAttribute::citation_count: return "citation_count";
    case NodeAttribute::degree: return "degree";
    case NodeAttribute::in_degree: return "in_degree";
    case NodeAttribute::pagerank: return "pagerank";
    case NodeAttribute::year: return "year";
    }
    return "citation_count";
}

std::optional<NodeAttribute> parse_node_attribute(std::string_view text) noexcept {
    for (auto a : {NodeAttribute::citation_count, NodeAttribute::degree, NodeAttribute::in_degree,
                   NodeAttribute::pagerank, NodeAttribute::year}) {
        if (to_string(a) == text) return a;
    }
    return std::nullopt;
}

namespace {

int hex_digit(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::optional<Rgb> Rgb::parse(std::string_view hex) noexcept {
    if (hex.size() != 7 || hex[0] != '#') return std::nullopt;
    std::array<std::uint8_t, 3> channels{};
    for (std::size_t i = 0; i < 3; ++i) {
        int hi = hex_digit(hex[1 + 2 * i]);
        int lo = hex_digit(hex[2 + 2 * i]);
        if (hi < 0 || lo < 0) return std::nullopt;
        channels[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return Rgb{channels[0], channels[1], channels[2]};
}

std::string Rgb::hex() const { return fmt::format("#{:02x}{:02x}{:02x}", r, g, b); }

void validate(const StyleConfig& style) {
    auto check_domain = [](Interval d, const char* name) {
        if (!std::isfinite(d.min) || !std::isfinite(d.max) || d.min > d.max) {
            throw Error(Errc::invalid_argument,
                        fmt::format("{} needs finite min <= max, got [{}, {}]", name, d.min, d.max),
                        name);
        }
    };
    check_domain(style.color_domain, "node_color_domain");
    check_domain(style.size_domain, "node_size_domain");
    check_domain(style.size_range, "node_size_range");
    if (!(style.size_range.min > 0.0)) {
        throw Error(Errc::invalid_argument, "node_size_range min must be > 0", "node_size_range");
    }
    if (style.label_max_chars < 1) {
        throw Error(Errc::invalid_argument, "label_max_chars must be >= 1", "label_max_chars");
    }
}

bool degenerate(Interval domain) noexcept { return domain.min == domain.max; }

double apply_style(double value, Interval domain, Interval range) {
    if (domain.min > domain.max) {
        throw Error(Errc::invalid_argument,
                    fmt::format("style domain [{}, {}] is inverted", domain.min, domain.max));
    }
    if (degenerate(domain)) return range.min + (range.max - range.min) / 2.0;
    double v = std::clamp(value, domain.min, domain.max);
    // Endpoints map exactly.
    if (v == domain.min) return range.min;
    if (v == domain.max) return range.max;
    return range.min + (v - domain.min) / (domain.max - domain.min) * (range.max - range.min);
}

Rgb apply_color(double value, Interval domain, Rgb lo, Rgb hi) {
    auto channel = [&](std::uint8_t a, std::uint8_t b) {
        double v = apply_style(value, domain, {static_cast<double>(a), static_cast<double>(b)});
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    };
    return {channel(lo.r, hi.r), channel(lo.g, hi.g), channel(lo.b, hi.b)};
}

double attribute_value(const Paper& paper, const NodeMetrics& metrics, NodeAttribute attribute,
                       double missing) {
    switch (attribute) {
    case NodeAttribute::citation_count: return static_cast<double>(paper.citation_count);
    case NodeAttribute::degree: return metrics.degree;
    case NodeAttribute::in_degree: return metrics.in_degree;
    case NodeAttribute::pagerank: return metrics.pagerank;
    case NodeAttribute::year: return paper.year ? static_cast<double>(*paper.year) : missing;
    }
    return missing;
}

std::string truncate_label(std::string_view title, int max_chars) {
    std::size_t pos = 0;
    int chars = 0;
    while (pos < title.size() && chars < max_chars) {
        auto lead = static_cast<unsigned char>(title[pos]);
        std::size_t width = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xe ? 3 : 4;
        pos = std::min(title.size(), pos + width);
        ++chars;
    }
    if (pos >= title.size()) return std::string(title);
    return std::string(title.substr(0, pos)) + "…";
}

} // namespace argo
