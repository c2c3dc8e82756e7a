#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "argo/error.hpp"
#include "argo/explore.hpp"
#include "argo/scholar_client.hpp"
#include "argo/sessions.hpp"
#include "argo/share_store.hpp"

namespace argo {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    // Origin used in minted share URLs and embed snippets. Taken from the
    // request's Host header when unset.
    std::optional<std::string> public_url;
    std::size_t max_snapshot_bytes = 5 * 1024 * 1024;
    // Origins allowed to call the API from a browser; "*" allows any.
    std::vector<std::string> cors_origins;
    // Built UI assets served at "/". A placeholder page is served without it.
    std::optional<std::filesystem::path> static_dir;
    std::chrono::seconds session_ttl{std::chrono::hours(2)};
    // Per-client-address limit on POST /api/snapshots.
    std::size_t publish_limit = 30;
    std::chrono::seconds publish_window{60};
    ExplorerOptions explorer;
};

// HTTP status used for each error code.
int http_status(Errc code) noexcept;

// {"code": "...", "message": "...", "detail": "..."}
std::string error_body(const Error& error);

// REST front end for snapshot sharing and exploration sessions:
//
//   POST  /api/snapshots                   publish a snapshot -> {share_id, url}
//   GET   /api/snapshots/{share_id}        canonical bytes, immutable
//   GET   /s/{share_id}                    UI page, editable copy
//   GET   /embed/{share_id}                UI page, read-only
//   GET   /embed/{share_id}/jupyter        IPython IFrame snippet (?width=&height=)
//   GET   /embed/{share_id}/iframe         HTML <iframe> snippet (?width=&height=)
//   POST  /api/sessions                    {} | snapshot | {corpus_id} | {share_id}
//   GET   /api/sessions/{id}/graph         render model
//   POST  /api/sessions/{id}/seed          {corpus_id}
//   POST  /api/sessions/{id}/expand        {node, direction, batch_size?, strategy?}
//   PATCH /api/sessions/{id}/style         style fields to change
//   POST  /api/sessions/{id}/layout        layout parameters to change, then relax
//   POST  /api/sessions/{id}/pin           {corpus_id, pinned, x?, y?}
//   GET   /api/sessions/{id}/snapshot      current state as a snapshot (?name=)
//   DELETE /api/sessions/{id}
class Server {
public:
    Server(ServerConfig config, std::shared_ptr<ScholarClient> client, std::shared_ptr<ShareStore> store);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds the listening socket and returns the port.
    int bind();
    // Serves on the calling thread until stop(). Binds first if needed.
    void listen();
    // bind() plus listen() on a background thread; returns once accepting.
    void start();
    void stop();

    int port() const noexcept;
    std::string local_url() const;
    SessionManager& sessions() noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace argo
