#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>

#include "argo/paper.hpp"

namespace argo {

enum class Endpoint { paper, references, citations };

std::string_view to_string(Endpoint endpoint) noexcept;

struct ApiRequest {
    Endpoint endpoint = Endpoint::paper;
    CorpusId id{};
    int offset = 0;  // always 0 for Endpoint::paper
    int limit = 0;   // always 0 for Endpoint::paper

    // {endpoint}_{corpusid}_{offset}_{limit}.json
    std::string fixture_name() const;
    auto operator<=>(const ApiRequest&) const = default;
};

struct ApiResponse {
    int status = 0;
    std::string body;
    std::optional<std::chrono::seconds> retry_after;
};

// Connection-level failure (DNS, TLS, reset). The client retries these.
class TransportFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual ApiResponse send(const ApiRequest& request) = 0;
};

// Semantic Scholar Graph API. URL templates, relative to the base URL
// (default https://api.semanticscholar.org/graph/v1):
//
//   paper:       /paper/CorpusId:{id}?fields=corpusId,title,abstract,authors,year,venue,
//                citationCount,externalIds,url,references.corpusId,references.title,
//                references.year,references.citationCount,citations.corpusId,
//                citations.title,citations.year,citations.citationCount
//   references:  /paper/CorpusId:{id}/references?fields=corpusId,title,year,citationCount
//                &offset={offset}&limit={limit}
//   citations:   /paper/CorpusId:{id}/citations?fields=corpusId,title,year,citationCount
//                &offset={offset}&limit={limit}
//
// An api key, when configured, is sent as the x-api-key header.
class HttpTransport final : public Transport {
public:
    static constexpr const char* default_base_url = "https://api.semanticscholar.org/graph/v1";

    explicit HttpTransport(std::string base_url = default_base_url,
                           std::optional<std::string> api_key = std::nullopt,
                           std::chrono::seconds timeout = std::chrono::seconds(30));

    ApiResponse send(const ApiRequest& request) override;

    // Path and query for a request, e.g. "/graph/v1/paper/CorpusId:9999?fields=...".
    std::string target(const ApiRequest& request) const;

private:
    std::string origin_;
    std::string path_prefix_;
    std::optional<std::string> api_key_;
    std::chrono::seconds timeout_;
};

// Serves recorded responses from a fixtures directory containing
// manifest.json. Lookup order for a request:
//   1. the exact recording named by fixture_name();
//   2. for references/citations, a page sliced from the recorded paper
//      response of the same id (its nested reference/citation lists);
//   3. a 404 when the paper itself was never recorded.
// A recorded paper with no way to answer the page is reported as
// Error{upstream_error}.
class ReplayTransport final : public Transport {
public:
    explicit ReplayTransport(std::filesystem::path fixtures_dir);

    ApiResponse send(const ApiRequest& request) override;

    std::size_t recordings() const noexcept { return recordings_.size(); }
    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    std::string read(const std::string& file) const;

    std::filesystem::path dir_;
    struct Recording {
        std::string file;
        int status = 200;
    };
    std::map<std::string, Recording> recordings_;  // keyed by fixture name
};

// Forwards to another transport and writes each 2xx/404 response into a
// fixtures directory, keeping manifest.json up to date.
class RecordingTransport final : public Transport {
public:
    RecordingTransport(std::unique_ptr<Transport> inner, std::filesystem::path fixtures_dir);

    ApiResponse send(const ApiRequest& request) override;

private:
    void write_manifest_locked();

    std::unique_ptr<Transport> inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::map<ApiRequest, int> recorded_;  // request -> status
};

} // namespace argo
