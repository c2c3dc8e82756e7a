#pragma once

#include <nlohmann/json.hpp>

#include "argo/explore.hpp"
#include "argo/layout.hpp"

namespace argo {

inline constexpr int kRenderModelVersion = 1;

// Everything the browser needs to draw the current graph in one document:
// nodes with metadata, coordinates, metrics and resolved size/color/label,
// the edge list, the style and the expansion cursors.
nlohmann::json render_model(const Exploration& state, const LayoutParams& layout = {});

nlohmann::json to_json(const ExpansionResult& result);

nlohmann::json style_to_json(const StyleConfig& style);

// Applies the fields present in `delta` (same keys as the snapshot style
// object) on top of `base`. Throws Error{invalid_argument} naming the field.
StyleConfig apply_style_delta(StyleConfig base, const nlohmann::json& delta);

nlohmann::json layout_to_json(const LayoutParams& params);
LayoutParams apply_layout_delta(LayoutParams base, const nlohmann::json& delta);

// {"node": id, "direction": "references"|"citations", "batch_size"?, "strategy"?}
ExpansionRequest parse_expansion_request(const nlohmann::json& body);

} // namespace argo
