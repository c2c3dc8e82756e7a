#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace argo {

enum class Errc {
    invalid_argument,
    invalid_paper,
    missing_endpoint,
    self_loop_rejected,
    unknown_paper,
    empty_network,
    not_found,
    rate_limited,
    upstream_error,
    malformed_response,
    parse_error,
    unsupported_version,
    invalid_snapshot,
    too_large,
    unknown_share_id,
    unknown_session,
    busy,
    storage_error,
};

// Stable CamelCase name used in structured error bodies ("InvalidPaper", ...).
std::string_view to_string(Errc code) noexcept;

// Single exception type for the library. `detail` carries a location
// (document path, byte offset) or upstream context when one exists.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::string detail = {});

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

    // Set for rate_limited and upstream_error.
    std::optional<std::chrono::seconds> retry_after() const noexcept { return retry_after_; }
    Error& with_retry_after(std::chrono::seconds wait) {
        retry_after_ = wait;
        return *this;
    }

private:
    Errc code_;
    std::string detail_;
    std::optional<std::chrono::seconds> retry_after_;
};

} // namespace argo
