// argo-scholar: command line front end for building, laying out and sharing
// citation networks, and for running the sharing/session server.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "argo/error.hpp"
#include "argo/explore.hpp"
#include "argo/layout.hpp"
#include "argo/render.hpp"
#include "argo/server.hpp"
#include "argo/share_store.hpp"
#include "argo/snapshot.hpp"
#include "argo/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Upstream {
    std::string mode = "live";
    std::string fixtures;
    std::string record_dir;
    std::string base_url = argo::HttpTransport::default_base_url;
    std::string api_key;
    std::size_t limit = 100;
    int window = 300;
    bool wait_on_limit = true;
};

std::shared_ptr<argo::ScholarClient> make_client(const Upstream& up) {
    std::shared_ptr<argo::Transport> transport;
    if (up.mode == "replay") {
        if (up.fixtures.empty()) {
            throw argo::Error(argo::Errc::invalid_argument, "replay mode needs --fixtures", "--fixtures");
        }
        transport = std::make_shared<argo::ReplayTransport>(up.fixtures);
    } else {
        std::optional<std::string> key;
        if (!up.api_key.empty()) key = up.api_key;
        auto http = std::make_unique<argo::HttpTransport>(up.base_url, key);
        if (!up.record_dir.empty()) {
            transport = std::make_shared<argo::RecordingTransport>(std::move(http), up.record_dir);
        } else {
            transport = std::move(http);
        }
    }
    argo::ClientOptions options;
    options.limiter_capacity = up.limit;
    options.limiter_window = std::chrono::seconds(up.window);
    options.block_on_limit = up.wait_on_limit;
    return std::make_shared<argo::ScholarClient>(std::move(transport), options);
}

std::chrono::sys_seconds now_seconds() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw argo::Error(argo::Errc::invalid_argument, "cannot read file", path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_atomically(const fs::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out.flush()) throw argo::Error(argo::Errc::storage_error, "cannot write file", tmp.string());
    }
    fs::rename(tmp, path);
}

argo::Snapshot load(const fs::path& path) {
    auto loaded = argo::deserialize(slurp(path));
    for (const auto& w : loaded.warnings) spdlog::warn("{}: {}", path.string(), w);
    return loaded.snapshot;
}

// Rewrites `path` with the new state, keeping the document's name and creation time.
void save(const fs::path& path, const argo::Exploration& state, const argo::Snapshot& previous,
          const argo::LayoutParams& layout) {
    write_atomically(path, argo::serialize(argo::to_snapshot(state, previous.name, previous.created_at, layout)));
}

struct ServerTarget {
    std::string origin;  // scheme://host[:port]
    std::string share_id;
};

// Accepts a bare share id, or any URL ending in /s/{id}, /embed/{id} or /api/snapshots/{id}.
ServerTarget parse_share_ref(const std::string& ref, const std::string& server) {
    auto slash = ref.find_last_of('/');
    ServerTarget t{server, slash == std::string::npos ? ref : ref.substr(slash + 1)};
    if (auto scheme = ref.find("://"); scheme != std::string::npos) {
        auto path = ref.find('/', scheme + 3);
        t.origin = ref.substr(0, path);
    }
    if (t.origin.empty()) {
        throw argo::Error(argo::Errc::invalid_argument, "no server given; pass --server or a full share URL",
                          "--server");
    }
    if (!argo::is_share_token(t.share_id)) {
        throw argo::Error(argo::Errc::invalid_argument, "not a share id", t.share_id);
    }
    return t;
}

std::string strip_slash(std::string s) {
    while (!s.empty() && s.back() == '/') s.pop_back();
    return s;
}

// Turns a non-2xx service reply into the matching argo::Error.
[[noreturn]] void raise_remote(const httplib::Result& r, const std::string& what) {
    if (!r) {
        throw argo::Error(argo::Errc::upstream_error,
                          fmt::format("{}: {}", what, httplib::to_string(r.error())));
    }
    auto body = json::parse(r->body, nullptr, false);
    std::string message = body.is_object() ? body.value("message", r->body) : r->body;
    std::string detail = body.is_object() ? body.value("detail", "") : "";
    std::string code = body.is_object() ? body.value("code", "") : "";
    // Keep the service's own error code so exit codes match local failures.
    auto errc = argo::Errc::upstream_error;
    for (int i = 0; i <= static_cast<int>(argo::Errc::storage_error); ++i) {
        if (argo::to_string(static_cast<argo::Errc>(i)) == code) errc = static_cast<argo::Errc>(i);
    }
    throw argo::Error(errc, fmt::format("{} failed with HTTP {} {}: {}", what, r->status, code, message), detail);
}

httplib::Client http_client(const std::string& origin) {
    httplib::Client cli(origin);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(60);
    return cli;
}

int exit_code(argo::Errc code) {
    switch (code) {
    case argo::Errc::not_found:
    case argo::Errc::unknown_paper:
    case argo::Errc::unknown_share_id:
    case argo::Errc::unknown_session:
        return 3;
    case argo::Errc::rate_limited:
        return 4;
    case argo::Errc::upstream_error:
    case argo::Errc::malformed_response:
        return 5;
    case argo::Errc::parse_error:
    case argo::Errc::unsupported_version:
    case argo::Errc::invalid_snapshot:
        return 6;
    default:
        return 1;
    }
}

argo::Server* running_server = nullptr;

extern "C" void on_signal(int) {
    if (running_server) running_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build, lay out and share citation networks from Semantic Scholar."};
    app.name("argo-scholar");
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);

    Upstream up;
    std::string log_level = "warn";
    app.add_option("--mode", up.mode, "Where paper data comes from")
        ->check(CLI::IsMember({"live", "replay"}))
        ->envname("ARGO_MODE")
        ->capture_default_str();
    app.add_option("--fixtures", up.fixtures, "Recorded responses for replay mode")->envname("ARGO_FIXTURES");
    app.add_option("--record", up.record_dir, "Live mode: also save every response here as fixtures")
        ->envname("ARGO_RECORD_DIR");
    app.add_option("--base-url", up.base_url, "Graph API base URL")->envname("ARGO_BASE_URL")->capture_default_str();
    app.add_option("--api-key", up.api_key, "Semantic Scholar API key")->envname("S2_API_KEY");
    app.add_option("--rate-limit", up.limit, "Requests allowed per window")
        ->envname("ARGO_RATE_LIMIT")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--rate-window", up.window, "Rate limit window in seconds")
        ->envname("ARGO_RATE_WINDOW")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--no-wait{false}", up.wait_on_limit,
                 "Fail with exit code 4 instead of sleeping when the rate limit is reached");
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
        ->envname("ARGO_LOG_LEVEL")
        ->capture_default_str();

    argo::LayoutParams layout;

    // ---- serve ----
    auto* serve = app.add_subcommand("serve", "Run the sharing and session server");
    argo::ServerConfig server_config;
    std::string storage_dir = "argo-data";
    std::string storage_kind = "files";
    int session_ttl = 7200;
    std::optional<int> retention_days;
    std::string static_dir;
    std::string public_url;
    serve->add_option("--host", server_config.host)->envname("ARGO_HOST")->capture_default_str();
    serve->add_option("--port", server_config.port)->envname("ARGO_PORT")->capture_default_str();
    serve->add_option("--storage-dir", storage_dir, "Where published snapshots live")
        ->envname("ARGO_STORAGE_DIR")
        ->capture_default_str();
    serve->add_option("--storage", storage_kind, "files: one file per snapshot; sqlite: single database")
        ->check(CLI::IsMember({"files", "sqlite", "memory"}))
        ->envname("ARGO_STORAGE")
        ->capture_default_str();
    serve->add_option("--retention-days", retention_days, "Stop serving snapshots older than this")
        ->envname("ARGO_RETENTION_DAYS")
        ->check(CLI::PositiveNumber);
    serve->add_option("--public-url", public_url, "Origin used in share URLs")->envname("ARGO_PUBLIC_URL");
    serve->add_option("--static-dir", static_dir, "Built UI assets served at /")->envname("ARGO_STATIC_DIR");
    serve->add_option("--cors", server_config.cors_origins, "Allowed browser origins")
        ->envname("ARGO_CORS_ORIGINS")
        ->delimiter(',');
    serve->add_option("--session-ttl", session_ttl, "Idle seconds before a session is dropped")
        ->envname("ARGO_SESSION_TTL")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    serve->add_option("--max-snapshot-bytes", server_config.max_snapshot_bytes)
        ->envname("ARGO_MAX_SNAPSHOT_BYTES")
        ->capture_default_str();
    serve->add_option("--publish-limit", server_config.publish_limit, "Publishes per client per window")
        ->capture_default_str();

    // ---- seed ----
    auto* seed = app.add_subcommand("seed", "Add a paper to a snapshot file (created when missing)");
    std::int64_t seed_id = 0;
    std::string out_file;
    std::string name = "Argo Scholar network";
    seed->add_option("corpus_id", seed_id, "Semantic Scholar CorpusID")->required()->check(CLI::PositiveNumber);
    seed->add_option("--out,-o", out_file, "Snapshot file")->required();
    seed->add_option("--name", name, "Name for a new snapshot")->capture_default_str();

    // ---- expand ----
    auto* expand = app.add_subcommand("expand", "Add the next batch of references or citations of a node");
    std::string file;
    std::int64_t node = 0;
    std::string direction = "references";
    int batch = 5;
    std::string strategy = "upstream_order";
    expand->add_option("file", file, "Snapshot file, updated in place")->required()->check(CLI::ExistingFile);
    expand->add_option("--node", node, "CorpusID to expand")->required();
    expand->add_option("--direction", direction, "refs|references|cites|citations")->capture_default_str();
    expand->add_option("--n", batch, "Papers to add")->check(CLI::PositiveNumber)->capture_default_str();
    expand->add_option("--strategy", strategy, "upstream_order|citation_count_desc|recency_desc")
        ->capture_default_str();

    // ---- layout ----
    auto* layout_cmd = app.add_subcommand("layout", "Run the force-directed layout on a snapshot file");
    layout_cmd->add_option("file", file, "Snapshot file, updated in place")->required()->check(CLI::ExistingFile);
    layout_cmd->add_option("--seed", layout.seed)->capture_default_str();
    layout_cmd->add_option("--iterations", layout.iterations)->capture_default_str();
    layout_cmd->add_option("--spring-length", layout.spring_length)->capture_default_str();
    layout_cmd->add_option("--repulsion", layout.repulsion_strength)->capture_default_str();
    std::vector<std::int64_t> pin_ids, unpin_ids;
    layout_cmd->add_option("--pin", pin_ids, "Pin these nodes before running");
    layout_cmd->add_option("--unpin", unpin_ids, "Unpin these nodes before running");

    // ---- export ----
    auto* export_cmd = app.add_subcommand("export", "Write a snapshot in another form");
    std::string format = "json";
    export_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--format", format, "json: canonical snapshot; render: render model")
        ->check(CLI::IsMember({"json", "render"}))
        ->capture_default_str();
    export_cmd->add_option("--out,-o", out_file, "Destination (stdout when omitted)");

    // ---- publish ----
    auto* publish = app.add_subcommand("publish", "Upload a snapshot and print its share URL");
    std::string server_url;
    publish->add_option("file", file)->required()->check(CLI::ExistingFile);
    publish->add_option("--server", server_url, "Server origin, e.g. http://localhost:8080")
        ->envname("ARGO_SERVER")
        ->required();

    // ---- open ----
    auto* open = app.add_subcommand("open", "Start a server session from a share id or URL");
    std::string share_ref;
    open->add_option("share", share_ref, "Share id or URL")->required();
    open->add_option("--server", server_url, "Server origin when only an id is given")->envname("ARGO_SERVER");
    open->add_option("--out,-o", out_file, "Also save the session's snapshot here");

    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(log_level));
    spdlog::set_default_logger(spdlog::default_logger());

    try {
        if (*serve) {
            argo::ShareStoreOptions store_options;
            if (retention_days) store_options.retention = std::chrono::hours(24 * *retention_days);
            std::shared_ptr<argo::ShareStore> store;
            if (storage_kind == "sqlite") {
                store = std::make_shared<argo::SqliteShareStore>(fs::path(storage_dir) / "shares.sqlite3",
                                                                 store_options);
            } else if (storage_kind == "memory") {
                store = std::make_shared<argo::MemoryShareStore>(store_options);
            } else {
                store = std::make_shared<argo::FileShareStore>(storage_dir, store_options);
            }
            up.wait_on_limit = false;  // the UI gets a 429 with a wait hint instead
            server_config.session_ttl = std::chrono::seconds(session_ttl);
            if (!public_url.empty()) server_config.public_url = public_url;
            if (!static_dir.empty()) server_config.static_dir = static_dir;
            argo::Server server(server_config, make_client(up), store);
            server.bind();
            running_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            // Scripts wait for this line to learn the port.
            std::cout << "listening on " << server.local_url() << std::endl;
            server.listen();
            running_server = nullptr;
            return 0;
        }

        if (*seed) {
            argo::Exploration state;
            argo::Snapshot previous;
            previous.name = name;
            previous.created_at = now_seconds();
            if (fs::exists(out_file)) {
                previous = load(out_file);
                state = argo::from_snapshot(previous);
            }
            auto client = make_client(up);
            argo::Explorer explorer(*client, {.layout = layout});
            bool added = explorer.seed(state, argo::corpus_id(seed_id));
            save(out_file, state, previous, layout);
            const auto& p = state.network.paper(argo::corpus_id(seed_id));
            std::cout << fmt::format("{} {}: {}\n", added ? "seeded" : "refreshed", seed_id, p.title);
            return 0;
        }

        if (*expand) {
            auto previous = load(file);
            auto state = argo::from_snapshot(previous);
            auto dir = argo::parse_direction(direction);
            if (!dir) throw argo::Error(argo::Errc::invalid_argument, "unknown direction", direction);
            auto strat = argo::parse_strategy(strategy);
            if (!strat) throw argo::Error(argo::Errc::invalid_argument, "unknown strategy", strategy);
            auto client = make_client(up);
            argo::Explorer explorer(*client, {.layout = layout});
            auto result = explorer.expand(state, {argo::corpus_id(node), *dir, batch, *strat});
            save(file, state, previous, layout);
            std::cout << fmt::format("added {} papers and {} edges; next offset {}{}\n", result.added_papers.size(),
                                     result.added_edges.size(), result.cursor,
                                     result.exhausted ? " (exhausted)" : "");
            return 0;
        }

        if (*layout_cmd) {
            auto previous = load(file);
            auto state = argo::from_snapshot(previous);
            for (auto id : pin_ids) argo::pin(state.network, argo::corpus_id(id), true);
            for (auto id : unpin_ids) argo::pin(state.network, argo::corpus_id(id), false);
            argo::apply_layout(state.network, layout);
            save(file, state, previous, layout);
            std::cout << fmt::format("laid out {} nodes (seed {}, {} iterations)\n", state.network.size(),
                                     layout.seed, layout.iterations);
            return 0;
        }

        if (*export_cmd) {
            auto snapshot = load(file);
            std::string bytes = format == "json"
                                    ? argo::serialize(snapshot)
                                    : argo::render_model(argo::from_snapshot(snapshot), layout).dump(2) + "\n";
            if (out_file.empty()) {
                std::cout << bytes;
            } else {
                write_atomically(out_file, bytes);
            }
            return 0;
        }

        if (*publish) {
            auto bytes = argo::serialize(load(file));
            auto cli = http_client(strip_slash(server_url));
            auto r = cli.Post("/api/snapshots", bytes, "application/json");
            if (!r || r->status != 201) raise_remote(r, "publish");
            auto body = json::parse(r->body);
            std::cout << body.at("url").get<std::string>() << "\n";
            return 0;
        }

        if (*open) {
            auto target = parse_share_ref(share_ref, strip_slash(server_url));
            auto cli = http_client(target.origin);
            auto r = cli.Post("/api/sessions", json{{"share_id", target.share_id}}.dump(), "application/json");
            if (!r || r->status != 201) raise_remote(r, "open");
            auto body = json::parse(r->body);
            auto session = body.at("session_id").get<std::string>();
            const auto& graph = body.at("graph");
            std::cout << fmt::format("session {} ({} nodes, {} edges)\n", session, graph.at("nodes").size(),
                                     graph.at("edges").size());
            if (!out_file.empty()) {
                auto snap = cli.Get(fmt::format("/api/sessions/{}/snapshot", session));
                if (!snap || snap->status != 200) raise_remote(snap, "snapshot download");
                write_atomically(out_file, snap->body);
            }
            return 0;
        }
    } catch (const argo::Error& e) {
        std::cerr << "error: " << argo::to_string(e.code()) << ": " << e.what();
        if (!e.detail().empty()) std::cerr << " [" << e.detail() << "]";
        if (auto wait = e.retry_after()) std::cerr << " (retry after " << wait->count() << "s)";
        std::cerr << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
