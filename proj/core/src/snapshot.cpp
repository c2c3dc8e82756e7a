#include "argo/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "argo/error.hpp"
#include "canonical_json.hpp"

namespace argo {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
    throw Error(Errc::invalid_snapshot, fmt::format("{}: {}", path, what), path);
}

std::string at(std::string_view base, std::string_view key) {
    return base.empty() ? std::string(key) : fmt::format("{}.{}", base, key);
}

std::string at(std::string_view base, std::size_t index) { return fmt::format("{}[{}]", base, index); }

} // namespace

double quantize(double value) {
    if (!std::isfinite(value)) return value;
    return std::strtod(detail::fixed6(value).c_str(), nullptr);
}

std::string format_timestamp(std::chrono::sys_seconds t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss hms{t - day};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::optional<std::chrono::sys_seconds> parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        auto first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc{} && ptr == first + len;
    };
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d) || !num(11, 2, h) || !num(14, 2, mi) ||
        !num(17, 2, s)) {
        return std::nullopt;
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

void validate(const Snapshot& snapshot) {
    if (snapshot.version != kSnapshotVersion) {
        throw Error(Errc::unsupported_version,
                    fmt::format("snapshot version {} is not supported (expected {})",
                                snapshot.version, kSnapshotVersion),
                    "version");
    }
    std::set<CorpusId> ids;
    for (std::size_t i = 0; i < snapshot.nodes.size(); ++i) {
        const auto& node = snapshot.nodes[i];
        auto path = at("nodes", i);
        try {
            validate(node.paper);
        } catch (const Error& e) {
            invalid(path, e.what());
        }
        if (!ids.insert(node.paper.corpus_id).second) {
            invalid(at(path, "corpus_id"),
                    fmt::format("duplicate corpus_id {}", raw(node.paper.corpus_id)));
        }
        if (!std::isfinite(node.x) || !std::isfinite(node.y)) invalid(path, "non-finite coordinates");
    }
    std::set<CitationEdge> edges;
    for (std::size_t i = 0; i < snapshot.edges.size(); ++i) {
        const auto& e = snapshot.edges[i];
        auto path = at("edges", i);
        auto label = fmt::format("edge {} -> {}", raw(e.source), raw(e.target));
        if (!ids.contains(e.source)) {
            invalid(path, fmt::format("{}: source {} is not a listed node", label, raw(e.source)));
        }
        if (!ids.contains(e.target)) {
            invalid(path, fmt::format("{}: target {} is not a listed node", label, raw(e.target)));
        }
        if (e.source == e.target) invalid(path, label + " is a self-loop");
        if (!edges.insert(e).second) invalid(path, "duplicate " + label);
    }
    try {
        validate(snapshot.style);
    } catch (const Error& e) {
        invalid(at("style", e.detail()), e.what());
    }
    std::set<std::pair<CorpusId, Direction>> cursor_keys;
    for (std::size_t i = 0; i < snapshot.cursors.size(); ++i) {
        const auto& c = snapshot.cursors[i];
        auto path = at("cursors", i);
        if (!ids.contains(c.corpus_id)) {
            invalid(path, fmt::format("cursor for {} which is not a listed node", raw(c.corpus_id)));
        }
        if (c.offset < 0) invalid(at(path, "offset"), "offset must be >= 0");
        if (!cursor_keys.insert({c.corpus_id, c.direction}).second) {
            invalid(path, fmt::format("duplicate cursor for {} {}", raw(c.corpus_id),
                                      to_string(c.direction)));
        }
    }
}

Snapshot canonicalize(Snapshot s) {
    std::sort(s.nodes.begin(), s.nodes.end(), [](const auto& a, const auto& b) {
        return a.paper.corpus_id < b.paper.corpus_id;
    });
    std::sort(s.edges.begin(), s.edges.end());
    std::sort(s.cursors.begin(), s.cursors.end(), [](const auto& a, const auto& b) {
        return std::tie(a.corpus_id, a.direction) < std::tie(b.corpus_id, b.direction);
    });
    for (auto& n : s.nodes) {
        n.x = quantize(n.x);
        n.y = quantize(n.y);
    }
    for (auto* iv : {&s.style.color_domain, &s.style.size_domain, &s.style.size_range}) {
        iv->min = quantize(iv->min);
        iv->max = quantize(iv->max);
    }
    return s;
}

namespace {

json optional_json(const auto& value) {
    if (!value) return nullptr;
    return *value;
}

json to_json(const StyleConfig& style) {
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

json to_json(const Snapshot& s) {
    json nodes = json::array();
    for (const auto& n : s.nodes) {
        const auto& p = n.paper;
        nodes.push_back({
            {"corpus_id", raw(p.corpus_id)},
            {"title", p.title},
            {"abstract", optional_json(p.abstract)},
            {"authors", p.authors},
            {"year", optional_json(p.year)},
            {"venue", optional_json(p.venue)},
            {"citation_count", p.citation_count},
            {"url", p.url},
            {"x", n.x},
            {"y", n.y},
            {"pinned", n.pinned},
        });
    }
    json edges = json::array();
    for (const auto& e : s.edges) edges.push_back({{"source", raw(e.source)}, {"target", raw(e.target)}});
    json cursors = json::array();
    for (const auto& c : s.cursors) {
        cursors.push_back({{"corpus_id", raw(c.corpus_id)},
                           {"direction", to_string(c.direction)},
                           {"offset", c.offset},
                           {"strategy", to_string(c.strategy)}});
    }
    return {
        {"version", s.version},   {"name", s.name},   {"created_at", format_timestamp(s.created_at)},
        {"nodes", nodes},         {"edges", edges},   {"style", to_json(s.style)},
        {"cursors", cursors},
    };
}

// Typed, path-aware accessors over a parsed document.
class Reader {
public:
    explicit Reader(std::vector<std::string>& warnings) : warnings_(warnings) {}

    const json& object(const json& parent, std::string_view key, const std::string& path) {
        const auto& v = field(parent, key, path);
        if (!v.is_object()) invalid(at(path, key), "expected an object");
        return v;
    }

    const json& array(const json& parent, std::string_view key, const std::string& path) {
        const auto& v = field(parent, key, path);
        if (!v.is_array()) invalid(at(path, key), "expected an array");
        return v;
    }

    std::string string(const json& parent, std::string_view key, const std::string& path) {
        const auto& v = field(parent, key, path);
        if (!v.is_string()) invalid(at(path, key), "expected a string");
        return v.get<std::string>();
    }

    std::optional<std::string> optional_string(const json& parent, std::string_view key,
                                               const std::string& path) {
        auto it = parent.find(key);
        if (it == parent.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) invalid(at(path, key), "expected a string or null");
        return it->get<std::string>();
    }

    std::int64_t integer(const json& value, const std::string& path) {
        if (!value.is_number_integer()) invalid(path, "expected an integer");
        return value.get<std::int64_t>();
    }

    std::int64_t integer(const json& parent, std::string_view key, const std::string& path) {
        return integer(field(parent, key, path), at(path, key));
    }

    std::optional<int> optional_int(const json& parent, std::string_view key,
                                    const std::string& path) {
        auto it = parent.find(key);
        if (it == parent.end() || it->is_null()) return std::nullopt;
        auto v = integer(*it, at(path, key));
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            invalid(at(path, key), "integer out of range");
        }
        return static_cast<int>(v);
    }

    double real(const json& value, const std::string& path) {
        if (!value.is_number()) invalid(path, "expected a number");
        return value.get<double>();
    }

    double real(const json& parent, std::string_view key, const std::string& path) {
        return real(field(parent, key, path), at(path, key));
    }

    bool boolean(const json& parent, std::string_view key, const std::string& path) {
        const auto& v = field(parent, key, path);
        if (!v.is_boolean()) invalid(at(path, key), "expected a boolean");
        return v.get<bool>();
    }

    Interval pair(const json& parent, std::string_view key, const std::string& path) {
        const auto& v = array(parent, key, path);
        auto p = at(path, key);
        if (v.size() != 2) invalid(p, "expected [min, max]");
        return {real(v[0], at(p, 0)), real(v[1], at(p, 1))};
    }

    void warn_unknown(const json& obj, std::initializer_list<std::string_view> known,
                      const std::string& path) {
        for (const auto& [key, value] : obj.items()) {
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                warnings_.push_back(fmt::format("ignored unknown field {}", at(path, key)));
            }
        }
    }

private:
    const json& field(const json& parent, std::string_view key, const std::string& path) {
        auto it = parent.find(key);
        if (it == parent.end()) invalid(at(path, key), "missing required field");
        return *it;
    }

    std::vector<std::string>& warnings_;
};

NodeAttribute attribute(Reader& r, const json& obj, std::string_view key, const std::string& path) {
    auto text = r.string(obj, key, path);
    auto a = parse_node_attribute(text);
    if (!a) invalid(at(path, key), fmt::format("unknown attribute '{}'", text));
    return *a;
}

Rgb color(const json& value, const std::string& path) {
    if (!value.is_string()) invalid(path, "expected a #RRGGBB string");
    auto c = Rgb::parse(value.get<std::string>());
    if (!c) invalid(path, fmt::format("'{}' is not a #RRGGBB color", value.get<std::string>()));
    return *c;
}

StyleConfig read_style(Reader& r, const json& obj, const std::string& path) {
    r.warn_unknown(obj,
                   {"node_color_attribute", "node_color_domain", "node_color_range",
                    "node_size_attribute", "node_size_domain", "node_size_range", "show_labels",
                    "label_max_chars", "show_edge_direction"},
                   path);
    StyleConfig s;
    s.color_attribute = attribute(r, obj, "node_color_attribute", path);
    s.color_domain = r.pair(obj, "node_color_domain", path);
    const auto& range = r.array(obj, "node_color_range", path);
    auto range_path = at(path, "node_color_range");
    if (range.size() != 2) invalid(range_path, "expected [low, high] colors");
    s.color_range = {color(range[0], at(range_path, 0)), color(range[1], at(range_path, 1))};
    s.size_attribute = attribute(r, obj, "node_size_attribute", path);
    s.size_domain = r.pair(obj, "node_size_domain", path);
    s.size_range = r.pair(obj, "node_size_range", path);
    s.show_labels = r.boolean(obj, "show_labels", path);
    auto chars = r.integer(obj, "label_max_chars", path);
    if (chars < 1 || chars > 100000) invalid(at(path, "label_max_chars"), "out of range");
    s.label_max_chars = static_cast<int>(chars);
    s.show_edge_direction = r.boolean(obj, "show_edge_direction", path);
    return s;
}

CorpusId read_id(Reader& r, const json& obj, std::string_view key, const std::string& path) {
    return corpus_id(r.integer(obj, key, path));
}

} // namespace

std::string serialize(const Snapshot& snapshot) {
    validate(snapshot);
    try {
        return detail::canonical_dump(to_json(canonicalize(snapshot)));
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_snapshot, fmt::format("cannot encode snapshot: {}", e.what()));
    }
}

LoadedSnapshot deserialize(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse_error, fmt::format("malformed JSON: {}", e.what()),
                    fmt::format("byte {}", e.byte));
    }
    if (!doc.is_object()) invalid("$", "snapshot must be a JSON object");

    LoadedSnapshot out;
    Reader r(out.warnings);
    auto version = r.integer(doc, "version", "");
    if (version != kSnapshotVersion) {
        throw Error(Errc::unsupported_version,
                    fmt::format("snapshot version {} is not supported (expected {})", version,
                                kSnapshotVersion),
                    "version");
    }
    r.warn_unknown(doc, {"version", "name", "created_at", "nodes", "edges", "style", "cursors"}, "");

    auto& s = out.snapshot;
    s.version = static_cast<int>(version);
    s.name = r.optional_string(doc, "name", "").value_or("");
    auto created = r.string(doc, "created_at", "");
    auto ts = parse_timestamp(created);
    if (!ts) invalid("created_at", fmt::format("'{}' is not YYYY-MM-DDTHH:MM:SSZ", created));
    s.created_at = *ts;

    const auto& nodes = r.array(doc, "nodes", "");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto path = at("nodes", i);
        const auto& n = nodes[i];
        if (!n.is_object()) invalid(path, "expected an object");
        r.warn_unknown(n,
                       {"corpus_id", "title", "abstract", "authors", "year", "venue",
                        "citation_count", "url", "x", "y", "pinned"},
                       path);
        SnapshotNode node;
        auto& p = node.paper;
        p.corpus_id = read_id(r, n, "corpus_id", path);
        p.title = r.string(n, "title", path);
        p.abstract = r.optional_string(n, "abstract", path);
        const auto& authors = r.array(n, "authors", path);
        for (std::size_t k = 0; k < authors.size(); ++k) {
            if (!authors[k].is_string()) invalid(at(at(path, "authors"), k), "expected a string");
            p.authors.push_back(authors[k].get<std::string>());
        }
        p.year = r.optional_int(n, "year", path);
        p.venue = r.optional_string(n, "venue", path);
        p.citation_count = r.integer(n, "citation_count", path);
        p.url = r.optional_string(n, "url", path).value_or("");
        node.x = r.real(n, "x", path);
        node.y = r.real(n, "y", path);
        node.pinned = n.contains("pinned") ? r.boolean(n, "pinned", path) : false;
        s.nodes.push_back(std::move(node));
    }

    const auto& edges = r.array(doc, "edges", "");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto path = at("edges", i);
        const auto& e = edges[i];
        if (!e.is_object()) invalid(path, "expected an object");
        r.warn_unknown(e, {"source", "target"}, path);
        s.edges.push_back({read_id(r, e, "source", path), read_id(r, e, "target", path)});
    }

    s.style = read_style(r, r.object(doc, "style", ""), "style");

    if (doc.contains("cursors")) {
        const auto& cursors = r.array(doc, "cursors", "");
        for (std::size_t i = 0; i < cursors.size(); ++i) {
            auto path = at("cursors", i);
            const auto& c = cursors[i];
            if (!c.is_object()) invalid(path, "expected an object");
            r.warn_unknown(c, {"corpus_id", "direction", "offset", "strategy"}, path);
            SnapshotCursor cursor;
            cursor.corpus_id = read_id(r, c, "corpus_id", path);
            auto dir = r.string(c, "direction", path);
            auto parsed_dir = parse_direction(dir);
            if (!parsed_dir) invalid(at(path, "direction"), fmt::format("unknown direction '{}'", dir));
            cursor.direction = *parsed_dir;
            auto offset = r.integer(c, "offset", path);
            if (offset < 0 || offset > std::numeric_limits<int>::max()) {
                invalid(at(path, "offset"), "offset out of range");
            }
            cursor.offset = static_cast<int>(offset);
            auto strategy = r.optional_string(c, "strategy", path).value_or("upstream_order");
            auto parsed_strategy = parse_strategy(strategy);
            if (!parsed_strategy) {
                invalid(at(path, "strategy"), fmt::format("unknown strategy '{}'", strategy));
            }
            cursor.strategy = *parsed_strategy;
            s.cursors.push_back(cursor);
        }
    }

    validate(s);
    s = canonicalize(std::move(s));
    return out;
}

} // namespace argo
