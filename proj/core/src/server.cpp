#include "argo/server.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "argo/layout.hpp"
#include "argo/rate_limiter.hpp"
#include "argo/render.hpp"
#include "argo/snapshot.hpp"

namespace argo {

using nlohmann::json;

int http_status(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument:
    case Errc::invalid_paper:
    case Errc::missing_endpoint:
    case Errc::self_loop_rejected:
    case Errc::empty_network:
    case Errc::parse_error:
    case Errc::unsupported_version:
    case Errc::invalid_snapshot:
        return 400;
    case Errc::unknown_paper:
    case Errc::not_found:
    case Errc::unknown_share_id:
    case Errc::unknown_session:
        return 404;
    case Errc::busy:
        return 409;
    case Errc::too_large:
        return 413;
    case Errc::rate_limited:
        return 429;
    case Errc::upstream_error:
    case Errc::malformed_response:
        return 502;
    case Errc::storage_error:
        return 500;
    }
    return 500;
}

std::string error_body(const Error& error) {
    json body{{"code", to_string(error.code())}, {"message", error.what()}, {"detail", error.detail()}};
    if (auto wait = error.retry_after()) body["retry_after"] = wait->count();
    return body.dump();
}

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
    res.status = http_status(e.code());
    if (auto wait = e.retry_after()) res.set_header("Retry-After", std::to_string(std::max<long long>(1, wait->count())));
    res.set_content(error_body(e), kJson);
}

json parse_body(const httplib::Request& req, bool allow_empty = false) {
    if (req.body.empty()) {
        if (allow_empty) return json::object();
        throw Error(Errc::invalid_argument, "request body is required", "body");
    }
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::invalid_argument, "request body is not valid JSON", "body");
    return j;
}

CorpusId corpus_id_field(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_number_integer() || it->get<std::int64_t>() <= 0) {
        throw Error(Errc::invalid_argument, fmt::format("{} must be a positive integer", key), key);
    }
    return corpus_id(it->get<std::int64_t>());
}

int dimension(const httplib::Request& req, const char* key, int fallback) {
    if (!req.has_param(key)) return fallback;
    auto text = req.get_param_value(key);
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v < 1 || v > 10000) {
        throw Error(Errc::invalid_argument, fmt::format("{} must be an integer in [1, 10000]", key), key);
    }
    return v;
}

std::string app_page(std::string_view share_id, std::string_view mode) {
    // share ids are restricted to [A-Za-z0-9_-], so they need no escaping here
    return fmt::format(R"(<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>Argo Scholar</title>
<link rel="stylesheet" href="/app.css">
</head>
<body>
<div id="argo-app" data-mode="{mode}" data-share-id="{id}" data-snapshot-url="/api/snapshots/{id}"></div>
<noscript>This citation network needs JavaScript. The raw snapshot is at <a href="/api/snapshots/{id}">/api/snapshots/{id}</a>.</noscript>
<script src="/app.js" defer></script>
</body>
</html>
)",
                       fmt::arg("mode", mode), fmt::arg("id", share_id));
}

} // namespace

struct Server::Impl {
    ServerConfig config;
    std::shared_ptr<ScholarClient> client;
    std::shared_ptr<ShareStore> store;
    SessionManager sessions;
    httplib::Server http;
    std::thread thread;
    int port = -1;

    std::mutex publish_mutex;
    std::map<std::string, std::unique_ptr<SlidingWindowLimiter>> publish_limits;

    Impl(ServerConfig c, std::shared_ptr<ScholarClient> cl, std::shared_ptr<ShareStore> st)
        : config(std::move(c)), client(std::move(cl)), store(std::move(st)), sessions(config.session_ttl) {
        if (!client) throw Error(Errc::invalid_argument, "server needs a scholar client");
        if (!store) throw Error(Errc::invalid_argument, "server needs a share store");
        config.explorer.layout.validate();
        routes();
    }

    std::string base_url(const httplib::Request& req) const {
        if (config.public_url) {
            auto url = *config.public_url;
            while (!url.empty() && url.back() == '/') url.pop_back();
            return url;
        }
        auto host = req.get_header_value("Host");
        if (host.empty()) host = fmt::format("{}:{}", config.host, port);
        return "http://" + host;
    }

    Explorer explorer(const SessionState& s) const {
        auto options = config.explorer;
        options.layout = s.layout;
        return Explorer(*client, options);
    }

    SessionState fresh_state() const {
        SessionState s;
        s.layout = config.explorer.layout;
        return s;
    }

    ShareRecord share(const std::string& id) const {
        auto record = store->get(id);
        if (!record) throw Error(Errc::unknown_share_id, "no snapshot with this share id", id);
        return *record;
    }

    void check_publish_rate(const std::string& client_addr) {
        std::lock_guard lock(publish_mutex);
        auto& limiter = publish_limits[client_addr];
        if (!limiter) limiter = std::make_unique<SlidingWindowLimiter>(config.publish_limit, config.publish_window);
        auto d = limiter->try_acquire(SlidingWindowLimiter::Clock::now());
        if (!d.granted) {
            auto secs = std::chrono::ceil<std::chrono::seconds>(d.wait);
            throw Error(Errc::rate_limited, "too many snapshots published from this address", client_addr)
                .with_retry_after(secs);
        }
    }

    static Error as_invalid_snapshot(const Error& e) {
        return Error(Errc::invalid_snapshot, fmt::format("{}: {}", to_string(e.code()), e.what()), e.detail());
    }

    json graph(const SessionState& s) const { return render_model(s.exploration, s.layout); }

    template <class Fn>
    static httplib::Server::Handler guarded(Fn fn) {
        return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                if (http_status(e.code()) >= 500) spdlog::warn("{} {}: {}", req.method, req.path, e.what());
                send_error(res, e);
            }
        };
    }

    void routes();
};

void Server::Impl::routes() {
    http.set_payload_max_length(config.max_snapshot_bytes + 1);

    http.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unexpected failure";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        spdlog::error("{} {}: {}", req.method, req.path, what);
        send_error(res, Error(Errc::storage_error, "internal error", what));
    });

    // Anything that leaves a 4xx/5xx without a body (unknown route, payload
    // over the limit) still gets the structured error shape.
    http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        Errc code = res.status == 413   ? Errc::too_large
                    : res.status == 404 ? Errc::not_found
                                        : Errc::invalid_argument;
        auto status = res.status;
        std::string message = status == 413 ? "request body is too large"
                              : status == 404 ? "no such route"
                                              : httplib::status_message(status);
        res.set_content(error_body(Error(code, message, req.path)), kJson);
        res.status = status;
        return httplib::Server::HandlerResponse::Handled;
    });

    http.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        auto origin = req.get_header_value("Origin");
        if (origin.empty()) return;
        auto& allowed = config.cors_origins;
        bool any = std::find(allowed.begin(), allowed.end(), "*") != allowed.end();
        if (any || std::find(allowed.begin(), allowed.end(), origin) != allowed.end()) {
            res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
            res.set_header("Vary", "Origin");
        }
    });

    http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });

    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match");
        res.set_header("Access-Control-Max-Age", "600");
    });

    // ---- sharing ----------------------------------------------------------

    http.Post("/api/snapshots", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (req.body.size() > config.max_snapshot_bytes) {
            throw Error(Errc::too_large,
                        fmt::format("snapshot is {} bytes; the limit is {}", req.body.size(),
                                    config.max_snapshot_bytes));
        }
        check_publish_rate(req.remote_addr);
        LoadedSnapshot loaded;
        try {
            loaded = deserialize(req.body);
        } catch (const Error& e) {
            throw as_invalid_snapshot(e);
        }
        auto record = store->put(serialize(loaded.snapshot));
        send_json(res, 201,
                  {{"share_id", record.share_id},
                   {"url", fmt::format("{}/s/{}", base_url(req), record.share_id)},
                   {"size_bytes", record.size_bytes},
                   {"warnings", loaded.warnings}});
    }));

    http.Get(R"(/api/snapshots/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto record = share(req.matches[1]);
        auto etag = fmt::format("\"{}\"", record.share_id);
        res.set_header("ETag", etag);
        res.set_header("Cache-Control", "public, max-age=31536000, immutable");
        if (req.get_header_value("If-None-Match") == etag) {
            res.status = 304;
            return;
        }
        res.status = 200;
        res.set_content(record.bytes, kJson);
    }));

    http.Get(R"(/s/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto record = share(req.matches[1]);
        res.set_content(app_page(record.share_id, "edit"), "text/html; charset=utf-8");
    }));

    http.Get(R"(/embed/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto record = share(req.matches[1]);
        res.set_content(app_page(record.share_id, "readonly"), "text/html; charset=utf-8");
    }));

    http.Get(R"(/embed/([^/]+)/(jupyter|iframe))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto record = share(req.matches[1]);
                 int width = dimension(req, "width", 800);
                 int height = dimension(req, "height", 600);
                 auto src = fmt::format("{}/embed/{}", base_url(req), record.share_id);
                 std::string snippet =
                     req.matches[2] == "jupyter"
                         ? fmt::format("from IPython.display import IFrame\n"
                                       "IFrame(src=\"{}\", width=\"{}\", height=\"{}\")\n",
                                       src, width, height)
                         : fmt::format("<iframe src=\"{}\" width=\"{}\" height=\"{}\" "
                                       "style=\"border:0\" loading=\"lazy\"></iframe>\n",
                                       src, width, height);
                 res.set_content(snippet, "text/plain; charset=utf-8");
             }));

    // ---- sessions ---------------------------------------------------------

    http.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
        sessions.sweep();
        auto body = parse_body(req, true);
        if (!body.is_object()) throw Error(Errc::invalid_argument, "expected a JSON object", "body");
        auto state = fresh_state();
        if (body.contains("version")) {
            try {
                state.exploration = from_snapshot(deserialize(req.body).snapshot);
            } catch (const Error& e) {
                throw as_invalid_snapshot(e);
            }
        } else if (body.contains("share_id")) {
            auto& sid = body["share_id"];
            if (!sid.is_string()) throw Error(Errc::invalid_argument, "share_id must be a string", "share_id");
            state.exploration = from_snapshot(deserialize(share(sid.get<std::string>()).bytes).snapshot);
        } else if (body.contains("corpus_id")) {
            explorer(state).seed(state.exploration, corpus_id_field(body, "corpus_id"));
        }
        auto model = graph(state);
        auto id = sessions.create(std::move(state));
        send_json(res, 201, {{"session_id", id}, {"graph", std::move(model)}});
    }));

    http.Get(R"(/api/sessions/([^/]+)/graph)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, graph(sessions.read(req.matches[1])));
    }));

    http.Post(R"(/api/sessions/([^/]+)/seed)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto id = corpus_id_field(parse_body(req), "corpus_id");
        auto out = sessions.mutate(req.matches[1], [&](SessionState& s) {
            bool added = explorer(s).seed(s.exploration, id);
            return json{{"added", added}, {"corpus_id", raw(id)}, {"graph", graph(s)}};
        });
        send_json(res, 200, out);
    }));

    http.Post(R"(/api/sessions/([^/]+)/expand)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto request = parse_expansion_request(parse_body(req));
        auto out = sessions.mutate(req.matches[1], [&](SessionState& s) {
            auto result = explorer(s).expand(s.exploration, request);
            return json{{"result", to_json(result)}, {"graph", graph(s)}};
        });
        send_json(res, 200, out);
    }));

    http.Patch(R"(/api/sessions/([^/]+)/style)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto delta = parse_body(req);
        auto out = sessions.mutate(req.matches[1], [&](SessionState& s) {
            s.exploration.style = apply_style_delta(s.exploration.style, delta);
            return graph(s);
        });
        send_json(res, 200, out);
    }));

    http.Post(R"(/api/sessions/([^/]+)/layout)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto delta = parse_body(req, true);
        auto out = sessions.mutate(req.matches[1], [&](SessionState& s) {
            s.layout = apply_layout_delta(s.layout, delta);
            apply_layout(s.exploration.network, s.layout);
            return graph(s);
        });
        send_json(res, 200, out);
    }));

    http.Post(R"(/api/sessions/([^/]+)/pin)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto id = corpus_id_field(body, "corpus_id");
        auto pinned = body.find("pinned");
        if (pinned == body.end() || !pinned->is_boolean()) {
            throw Error(Errc::invalid_argument, "pinned must be a boolean", "pinned");
        }
        std::optional<Point> at;
        if (body.contains("x") || body.contains("y")) {
            if (!body.value("x", json()).is_number() || !body.value("y", json()).is_number()) {
                throw Error(Errc::invalid_argument, "x and y must both be numbers", "x");
            }
            at = Point{body["x"].get<double>(), body["y"].get<double>()};
        }
        auto out = sessions.mutate(req.matches[1], [&](SessionState& s) {
            if (at) s.exploration.network.place(id, *at);
            pin(s.exploration.network, id, pinned->get<bool>());
            return graph(s);
        });
        send_json(res, 200, out);
    }));

    http.Get(R"(/api/sessions/([^/]+)/snapshot)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto state = sessions.read(req.matches[1]);
        auto name = req.has_param("name") ? req.get_param_value("name") : std::string("Argo Scholar network");
        auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
        res.set_header("Content-Disposition",
                       fmt::format("attachment; filename=\"network{}\"", kSnapshotExtension));
        res.set_content(serialize(to_snapshot(state.exploration, name, now, state.layout)), kJson);
    }));

    http.Delete(R"(/api/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!sessions.erase(req.matches[1])) {
            throw Error(Errc::unknown_session, "no such session", req.matches[1]);
        }
        res.status = 204;
    }));

    // ---- UI ---------------------------------------------------------------

    bool mounted = false;
    if (config.static_dir) {
        mounted = http.set_mount_point("/", config.static_dir->string());
        if (!mounted) spdlog::warn("static UI directory {} not found", config.static_dir->string());
    }
    if (!mounted) {
        http.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(app_page("", "edit"), "text/html; charset=utf-8");
        });
    }
}

Server::Server(ServerConfig config, std::shared_ptr<ScholarClient> client, std::shared_ptr<ShareStore> store)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(client), std::move(store))) {}

Server::~Server() { stop(); }

int Server::bind() {
    if (impl_->port >= 0) return impl_->port;
    auto& c = impl_->config;
    int port = c.port == 0 ? impl_->http.bind_to_any_port(c.host)
                           : (impl_->http.bind_to_port(c.host, c.port) ? c.port : -1);
    if (port < 0) {
        throw Error(Errc::storage_error, fmt::format("cannot listen on {}:{}", c.host, c.port));
    }
    impl_->port = port;
    return port;
}

void Server::listen() {
    bind();
    spdlog::info("listening on {}", local_url());
    impl_->http.listen_after_bind();
}

void Server::start() {
    bind();
    impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
}

void Server::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::port() const noexcept { return impl_->port; }

std::string Server::local_url() const { return fmt::format("http://{}:{}", impl_->config.host, impl_->port); }

SessionManager& Server::sessions() noexcept { return impl_->sessions; }

} // namespace argo
