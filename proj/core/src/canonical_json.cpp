#include "canonical_json.hpp"

#include <cmath>

#include <fmt/format.h>

namespace argo::detail {

std::string fixed6(double value) {
    if (!std::isfinite(value)) throw std::domain_error("non-finite number in canonical JSON");
    auto text = fmt::format("{:.6f}", value);
    if (text == "-0.000000") text.erase(0, 1);
    return text;
}

namespace {

void write(std::string& out, const nlohmann::json& value, int depth) {
    auto indent = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
    switch (value.type()) {
    case nlohmann::json::value_t::object: {
        if (value.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, item] : value.items()) {
            if (!first) out += ",\n";
            first = false;
            indent(depth + 1);
            out += nlohmann::json(key).dump();
            out += ": ";
            write(out, item, depth + 1);
        }
        out += '\n';
        indent(depth);
        out += '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (value.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& item : value) {
            if (!first) out += ",\n";
            first = false;
            indent(depth + 1);
            write(out, item, depth + 1);
        }
        out += '\n';
        indent(depth);
        out += ']';
        return;
    }
    case nlohmann::json::value_t::number_float:
        out += fixed6(value.get<double>());
        return;
    default:
        out += value.dump();
        return;
    }
}

} // namespace

std::string canonical_dump(const nlohmann::json& value) {
    std::string out;
    write(out, value, 0);
    out += '\n';
    return out;
}

} // namespace argo::detail
