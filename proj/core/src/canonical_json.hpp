#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace argo::detail {

// Deterministic text form of a JSON value: object keys in byte order (the
// default nlohmann::json object is a std::map), floats with exactly six
// decimals, integers verbatim, 2-space indentation. Throws
// nlohmann::json::type_error for strings that are not valid UTF-8.
std::string canonical_dump(const nlohmann::json& value);

std::string fixed6(double value);

} // namespace argo::detail
