#include "argo/render.hpp"

#include <fmt/format.h>

#include "argo/error.hpp"

namespace argo {

using nlohmann::json;

namespace {

json optional_json(const auto& value) {
    if (!value) return nullptr;
    return *value;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
    throw Error(Errc::invalid_argument, fmt::format("{}: {}", field, what), field);
}

double number(const json& delta, const char* key) {
    const auto& v = delta.at(key);
    if (!v.is_number()) bad_field(key, "expected a number");
    return v.get<double>();
}

Interval interval(const json& delta, const char* key) {
    const auto& v = delta.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        bad_field(key, "expected [min, max]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

bool flag(const json& delta, const char* key) {
    const auto& v = delta.at(key);
    if (!v.is_boolean()) bad_field(key, "expected a boolean");
    return v.get<bool>();
}

NodeAttribute attribute(const json& delta, const char* key) {
    const auto& v = delta.at(key);
    auto a = v.is_string() ? parse_node_attribute(v.get<std::string>()) : std::nullopt;
    if (!a) bad_field(key, "unknown node attribute");
    return *a;
}

} // namespace

json style_to_json(const StyleConfig& style) {
    return {
        {"node_color_attribute", to_string(style.color_attribute)},
        {"node_color_domain", {style.color_domain.min, style.color_domain.max}},
        {"node_color_range", {style.color_range[0].hex(), style.color_range[1].hex()}},
        {"node_size_attribute", to_string(style.size_attribute)},
        {"node_size_domain", {style.size_domain.min, style.size_domain.max}},
        {"node_size_range", {style.size_range.min, style.size_range.max}},
        {"show_labels", style.show_labels},
        {"label_max_chars", style.label_max_chars},
        {"show_edge_direction", style.show_edge_direction},
    };
}

StyleConfig apply_style_delta(StyleConfig s, const json& delta) {
    if (!delta.is_object()) bad_field("style", "expected an object");
    for (const auto& [key, value] : delta.items()) {
        if (key == "node_color_attribute") {
            s.color_attribute = attribute(delta, "node_color_attribute");
        } else if (key == "node_color_domain") {
            s.color_domain = interval(delta, "node_color_domain");
        } else if (key == "node_color_range") {
            if (!value.is_array() || value.size() != 2) bad_field(key, "expected [low, high]");
            for (std::size_t i = 0; i < 2; ++i) {
                auto c = value[i].is_string() ? Rgb::parse(value[i].get<std::string>()) : std::nullopt;
                if (!c) bad_field(key, "colors must be #RRGGBB");
                s.color_range[i] = *c;
            }
        } else if (key == "node_size_attribute") {
            s.size_attribute = attribute(delta, "node_size_attribute");
        } else if (key == "node_size_domain") {
            s.size_domain = interval(delta, "node_size_domain");
        } else if (key == "node_size_range") {
            s.size_range = interval(delta, "node_size_range");
        } else if (key == "show_labels") {
            s.show_labels = flag(delta, "show_labels");
        } else if (key == "label_max_chars") {
            if (!value.is_number_integer()) bad_field(key, "expected an integer");
            s.label_max_chars = value.get<int>();
        } else if (key == "show_edge_direction") {
            s.show_edge_direction = flag(delta, "show_edge_direction");
        } else {
            bad_field(key, "unknown style field");
        }
    }
    validate(s);
    return s;
}

json layout_to_json(const LayoutParams& p) {
    return {
        {"repulsion_strength", p.repulsion_strength}, {"spring_length", p.spring_length},
        {"spring_strength", p.spring_strength},       {"gravity", p.gravity},
        {"iterations", p.iterations},                 {"cooling_factor", p.cooling_factor},
        {"seed", p.seed},                             {"vertical_spacing", p.vertical_spacing},
        {"horizontal_offset", p.horizontal_offset},
    };
}

LayoutParams apply_layout_delta(LayoutParams p, const json& delta) {
    if (delta.is_null()) return p;
    if (!delta.is_object()) bad_field("layout", "expected an object");
    for (const auto& [key, value] : delta.items()) {
        if (key == "repulsion_strength") p.repulsion_strength = number(delta, "repulsion_strength");
        else if (key == "spring_length") p.spring_length = number(delta, "spring_length");
        else if (key == "spring_strength") p.spring_strength = number(delta, "spring_strength");
        else if (key == "gravity") p.gravity = number(delta, "gravity");
        else if (key == "cooling_factor") p.cooling_factor = number(delta, "cooling_factor");
        else if (key == "vertical_spacing") p.vertical_spacing = number(delta, "vertical_spacing");
        else if (key == "horizontal_offset") p.horizontal_offset = number(delta, "horizontal_offset");
        else if (key == "iterations" || key == "seed") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
                bad_field(key, "expected a non-negative integer");
            }
            if (key == "iterations") p.iterations = value.get<int>();
            else p.seed = value.get<std::uint64_t>();
        } else {
            bad_field(key, "unknown layout parameter");
        }
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw Error(Errc::invalid_argument, e.what(), "layout");
    }
    return p;
}

ExpansionRequest parse_expansion_request(const json& body) {
    if (!body.is_object()) bad_field("body", "expected an object");
    ExpansionRequest req;
    auto node = body.find("node");
    if (node == body.end() || !node->is_number_integer()) bad_field("node", "expected a CorpusID");
    req.node = corpus_id(node->get<std::int64_t>());
    auto dir = body.find("direction");
    if (dir == body.end() || !dir->is_string()) bad_field("direction", "expected references|citations");
    auto parsed_dir = parse_direction(dir->get<std::string>());
    if (!parsed_dir) bad_field("direction", "expected references|citations");
    req.direction = *parsed_dir;
    if (auto n = body.find("batch_size"); n != body.end()) {
        if (!n->is_number_integer() || n->get<int>() < 1) bad_field("batch_size", "expected an integer >= 1");
        req.batch_size = n->get<int>();
    }
    if (auto st = body.find("strategy"); st != body.end()) {
        auto parsed = st->is_string() ? parse_strategy(st->get<std::string>()) : std::nullopt;
        if (!parsed) bad_field("strategy", "expected upstream_order|citation_count_desc|recency_desc");
        req.strategy = *parsed;
    }
    return req;
}

json to_json(const ExpansionResult& result) {
    json papers = json::array();
    for (auto id : result.added_papers) papers.push_back(raw(id));
    json edges = json::array();
    for (const auto& e : result.added_edges) {
        edges.push_back({{"source", raw(e.source)}, {"target", raw(e.target)}});
    }
    return {{"added_papers", papers},
            {"added_edges", edges},
            {"cursor", result.cursor},
            {"exhausted", result.exhausted}};
}

json render_model(const Exploration& state, const LayoutParams& layout) {
    const auto& net = state.network;
    const auto& style = state.style;
    json nodes = json::array();
    for (const auto& [id, p] : net.papers()) {
        const auto& m = net.metrics(id);
        auto at = net.location(id).value_or(initial_position(id, layout));
        double size_value = attribute_value(p, m, style.size_attribute, style.size_domain.min);
        double color_value = attribute_value(p, m, style.color_attribute, style.color_domain.min);
        nodes.push_back({
            {"corpus_id", raw(id)},
            {"title", p.title},
            {"abstract", optional_json(p.abstract)},
            {"authors", p.authors},
            {"year", optional_json(p.year)},
            {"venue", optional_json(p.venue)},
            {"citation_count", p.citation_count},
            {"url", p.url},
            {"x", at.x},
            {"y", at.y},
            {"pinned", net.pinned(id)},
            {"in_degree", m.in_degree},
            {"out_degree", m.out_degree},
            {"degree", m.degree},
            {"pagerank", m.pagerank},
            {"size", apply_style(size_value, style.size_domain, style.size_range)},
            {"color", apply_color(color_value, style.color_domain, style.color_range[0],
                                  style.color_range[1]).hex()},
            {"label", truncate_label(p.title, style.label_max_chars)},
        });
    }
    json edges = json::array();
    for (const auto& e : net.edges()) edges.push_back({{"source", raw(e.source)}, {"target", raw(e.target)}});
    json cursors = json::array();
    for (const auto& [key, c] : state.cursors) {
        cursors.push_back({{"corpus_id", raw(key.node)},
                           {"direction", to_string(key.direction)},
                           {"offset", c.offset},
                           {"strategy", to_string(c.strategy)}});
    }
    json warnings = json::array();
    if (degenerate(style.size_domain)) warnings.push_back("node_size_domain is degenerate; sizes use the range midpoint");
    if (degenerate(style.color_domain)) warnings.push_back("node_color_domain is degenerate; colors use the range midpoint");
    return {{"version", kRenderModelVersion},
            {"nodes", nodes},
            {"edges", edges},
            {"style", style_to_json(style)},
            {"cursors", cursors},
            {"warnings", warnings}};
}

} // namespace argo
