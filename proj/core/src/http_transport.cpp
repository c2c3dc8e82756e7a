#include <httplib.h>

#include <fmt/format.h>

#include "argo/error.hpp"
#include "argo/transport.hpp"

namespace argo {

namespace {

constexpr const char* kPaperFields =
    "corpusId,title,abstract,authors,year,venue,citationCount,externalIds,url,"
    "references.corpusId,references.title,references.year,references.citationCount,"
    "citations.corpusId,citations.title,citations.year,citations.citationCount";
constexpr const char* kLinkedFields = "corpusId,title,year,citationCount";

} // namespace

HttpTransport::HttpTransport(std::string base_url, std::optional<std::string> api_key,
                             std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(Errc::invalid_argument, "upstream base URL needs a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpTransport::target(const ApiRequest& request) const {
    switch (request.endpoint) {
    case Endpoint::paper:
        return fmt::format("{}/paper/CorpusId:{}?fields={}", path_prefix_, raw(request.id),
                           kPaperFields);
    case Endpoint::references:
    case Endpoint::citations:
        return fmt::format("{}/paper/CorpusId:{}/{}?fields={}&offset={}&limit={}", path_prefix_,
                           raw(request.id), to_string(request.endpoint), kLinkedFields,
                           request.offset, request.limit);
    }
    return {};
}

ApiResponse HttpTransport::send(const ApiRequest& request) {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);

    httplib::Headers headers{{"Accept", "application/json"}};
    if (api_key_) headers.emplace("x-api-key", *api_key_);

    auto result = client.Get(target(request), headers);
    if (!result) {
        throw TransportFailure(fmt::format("{} {}: {}", origin_, request.fixture_name(),
                                           httplib::to_string(result.error())));
    }
    ApiResponse response{result->status, result->body, std::nullopt};
    if (result->has_header("Retry-After")) {
        try {
            response.retry_after = std::chrono::seconds(std::stol(result->get_header_value("Retry-After")));
        } catch (const std::exception&) {
            // HTTP-date form; fall back to the client's default backoff.
        }
    }
    return response;
}

} // namespace argo
