#include "argo/error.hpp"

#include <utility>

namespace argo {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_paper: return "InvalidPaper";
    case Errc::missing_endpoint: return "MissingEndpoint";
    case Errc::self_loop_rejected: return "SelfLoopRejected";
    case Errc::unknown_paper: return "UnknownPaper";
    case Errc::empty_network: return "EmptyNetwork";
    case Errc::not_found: return "NotFound";
    case Errc::rate_limited: return "RateLimited";
    case Errc::upstream_error: return "UpstreamError";
    case Errc::malformed_response: return "MalformedResponse";
    case Errc::parse_error: return "ParseError";
    case Errc::unsupported_version: return "UnsupportedVersion";
    case Errc::invalid_snapshot: return "InvalidSnapshot";
    case Errc::too_large: return "TooLarge";
    case Errc::unknown_share_id: return "UnknownShareId";
    case Errc::unknown_session: return "UnknownSession";
    case Errc::busy: return "Busy";
    case Errc::storage_error: return "StorageError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::string detail)
    : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

} // namespace argo
