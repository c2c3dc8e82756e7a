#include <doctest.h>

#include <future>
#include <random>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "argo/error.hpp"
#include "argo/server.hpp"
#include "argo/snapshot.hpp"
#include "support.hpp"

using namespace argo;
using nlohmann::json;

namespace {

struct Harness {
    std::shared_ptr<Transport> transport;
    std::shared_ptr<ScholarClient> client;
    std::shared_ptr<ShareStore> store = std::make_shared<MemoryShareStore>();
    std::unique_ptr<Server> server;
    std::unique_ptr<httplib::Client> http;

    explicit Harness(ServerConfig config = {}, std::shared_ptr<Transport> t = argo::test::replay())
        : transport(std::move(t)), client(std::make_shared<ScholarClient>(transport)) {
        config.port = 0;
        server = std::make_unique<Server>(config, client, store);
        server->start();
        http = std::make_unique<httplib::Client>("127.0.0.1", server->port());
        http->set_read_timeout(10, 0);
    }

    std::string base() const { return server->local_url(); }

    httplib::Result post(const std::string& path, const std::string& body) {
        return http->Post(path, body, "application/json");
    }
    httplib::Result post(const std::string& path, const json& body) { return post(path, body.dump()); }
};

json body_of(const httplib::Result& r) {
    REQUIRE(r);
    return json::parse(r->body);
}

void check_error(const httplib::Result& r, int status, const std::string& code) {
    REQUIRE(r);
    CHECK(r->status == status);
    auto b = json::parse(r->body);
    CHECK(b["code"] == code);
    CHECK(b["message"].is_string());
    CHECK(b.contains("detail"));
}

std::string sample_snapshot() {
    std::mt19937_64 rng(44);
    auto s = argo::test::random_snapshot(rng, 8);
    while (s.nodes.size() < 2) s = argo::test::random_snapshot(rng, 8);
    return serialize(s);
}

} // namespace

TEST_SUITE("server") {

TEST_CASE("status mapping") {
    CHECK(http_status(Errc::invalid_snapshot) == 400);
    CHECK(http_status(Errc::parse_error) == 400);
    CHECK(http_status(Errc::unsupported_version) == 400);
    CHECK(http_status(Errc::unknown_share_id) == 404);
    CHECK(http_status(Errc::unknown_session) == 404);
    CHECK(http_status(Errc::busy) == 409);
    CHECK(http_status(Errc::too_large) == 413);
    CHECK(http_status(Errc::rate_limited) == 429);
    CHECK(http_status(Errc::upstream_error) == 502);
    CHECK(http_status(Errc::storage_error) == 500);
    auto body = json::parse(error_body(Error(Errc::rate_limited, "slow down", "x").with_retry_after(std::chrono::seconds(9))));
    CHECK(body == json{{"code", "RateLimited"}, {"message", "slow down"}, {"detail", "x"}, {"retry_after", 9}});
}

TEST_CASE("publish then fetch returns the canonical bytes") {
    Harness h;
    auto bytes = sample_snapshot();
    // publish a reordered, non-canonical spelling of the same document
    auto r = h.post("/api/snapshots", json::parse(bytes).dump());
    REQUIRE(r);
    CHECK(r->status == 201);
    auto b = json::parse(r->body);
    auto id = b["share_id"].get<std::string>();
    CHECK(id == share_token(bytes));
    CHECK(b["url"] == h.base() + "/s/" + id);
    CHECK(b["size_bytes"] == bytes.size());

    auto g = h.http->Get("/api/snapshots/" + id);
    REQUIRE(g);
    CHECK(g->status == 200);
    CHECK(g->body == bytes);
    CHECK(g->get_header_value("ETag") == "\"" + id + "\"");
    CHECK(g->get_header_value("Cache-Control").find("immutable") != std::string::npos);

    auto again = h.post("/api/snapshots", bytes);
    CHECK(body_of(again)["share_id"] == id);
    CHECK(h.store->size() == 1);

    auto cached = h.http->Get("/api/snapshots/" + id, {{"If-None-Match", "\"" + id + "\""}});
    REQUIRE(cached);
    CHECK(cached->status == 304);
    CHECK(cached->body.empty());
}

TEST_CASE("share pages and embed snippets") {
    Harness h;
    auto id = body_of(h.post("/api/snapshots", sample_snapshot()))["share_id"].get<std::string>();
    auto page = h.http->Get("/s/" + id);
    REQUIRE(page);
    CHECK(page->status == 200);
    CHECK(page->body.find("data-mode=\"edit\"") != std::string::npos);
    CHECK(page->body.find(id) != std::string::npos);
    auto embed = h.http->Get("/embed/" + id);
    REQUIRE(embed);
    CHECK(embed->body.find("data-mode=\"readonly\"") != std::string::npos);

    auto jup = h.http->Get("/embed/" + id + "/jupyter?width=640&height=480");
    REQUIRE(jup);
    CHECK(jup->status == 200);
    CHECK(jup->body == "from IPython.display import IFrame\nIFrame(src=\"" + h.base() + "/embed/" + id +
                           "\", width=\"640\", height=\"480\")\n");
    auto defaults = h.http->Get("/embed/" + id + "/jupyter");
    REQUIRE(defaults);
    CHECK(defaults->body.find("width=\"800\", height=\"600\"") != std::string::npos);
    auto iframe = h.http->Get("/embed/" + id + "/iframe?width=300");
    REQUIRE(iframe);
    CHECK(iframe->body.starts_with("<iframe src=\"" + h.base() + "/embed/" + id + "\" width=\"300\" height=\"600\""));
    check_error(h.http->Get("/embed/" + id + "/jupyter?width=0"), 400, "InvalidArgument");
    check_error(h.http->Get("/embed/" + id + "/jupyter?height=tall"), 400, "InvalidArgument");
}

TEST_CASE("public url overrides the host header") {
    ServerConfig c;
    c.public_url = "https://argo.example.org";
    Harness h(c);
    auto b = body_of(h.post("/api/snapshots", sample_snapshot()));
    CHECK(b["url"] == "https://argo.example.org/s/" + b["share_id"].get<std::string>());
}

TEST_CASE("unknown ids are structured 404s") {
    Harness h;
    check_error(h.http->Get("/api/snapshots/AAAAAAAAAAAA"), 404, "UnknownShareId");
    check_error(h.http->Get("/api/snapshots/nonsense"), 404, "UnknownShareId");
    check_error(h.http->Get("/s/AAAAAAAAAAAA"), 404, "UnknownShareId");
    check_error(h.http->Get("/embed/AAAAAAAAAAAA/jupyter"), 404, "UnknownShareId");
    check_error(h.http->Get("/api/sessions/nope/graph"), 404, "UnknownSession");
    check_error(h.http->Get("/no/such/route"), 404, "NotFound");
}

TEST_CASE("bad snapshots are rejected with a location") {
    Harness h;
    auto doc = json::parse(sample_snapshot());
    doc["edges"].push_back({{"source", doc["nodes"][0]["corpus_id"]}, {"target", 1}});
    auto r = h.post("/api/snapshots", doc);
    check_error(r, 400, "InvalidSnapshot");
    CHECK(body_of(r)["detail"].get<std::string>().starts_with("edges["));

    doc = json::parse(sample_snapshot());
    doc["version"] = 7;
    r = h.post("/api/snapshots", doc);
    check_error(r, 400, "InvalidSnapshot");
    CHECK(body_of(r)["message"].get<std::string>().starts_with("UnsupportedVersion"));

    r = h.post("/api/snapshots", std::string("{not json"));
    check_error(r, 400, "InvalidSnapshot");
    CHECK(body_of(r)["detail"].get<std::string>().starts_with("byte "));
    CHECK(h.store->size() == 0);
}

TEST_CASE("oversized snapshots are 413") {
    ServerConfig c;
    c.max_snapshot_bytes = 1000;
    Harness h(c);
    std::string big(5000, ' ');
    auto r = h.post("/api/snapshots", big);
    REQUIRE(r);
    CHECK(r->status == 413);
    CHECK(json::parse(r->body)["code"] == "TooLarge");
}

TEST_CASE("publishing is rate limited per address") {
    ServerConfig c;
    c.publish_limit = 3;
    Harness h(c);
    auto bytes = sample_snapshot();
    for (int i = 0; i < 3; ++i) CHECK(h.post("/api/snapshots", bytes)->status == 201);
    auto r = h.post("/api/snapshots", bytes);
    check_error(r, 429, "RateLimited");
    int retry = std::stoi(r->get_header_value("Retry-After"));
    CHECK(retry >= 1);
    CHECK(retry <= 60);
    CHECK(body_of(r)["retry_after"].is_number());
}

TEST_CASE("CORS headers for allowed origins only") {
    ServerConfig c;
    c.cors_origins = {"https://notebook.example"};
    Harness h(c);
    auto ok = h.http->Get("/api/snapshots/AAAAAAAAAAAA", {{"Origin", "https://notebook.example"}});
    REQUIRE(ok);
    CHECK(ok->get_header_value("Access-Control-Allow-Origin") == "https://notebook.example");
    auto other = h.http->Get("/api/snapshots/AAAAAAAAAAAA", {{"Origin", "https://evil.example"}});
    REQUIRE(other);
    CHECK_FALSE(other->has_header("Access-Control-Allow-Origin"));
    auto pre = h.http->Options("/api/snapshots", {{"Origin", "https://notebook.example"}});
    REQUIRE(pre);
    CHECK(pre->status == 204);
    CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("PATCH") != std::string::npos);
}

TEST_CASE("a session explores, styles, pins and exports") {
    Harness h;
    auto created = h.post("/api/sessions", json{{"corpus_id", 9999}});
    REQUIRE(created);
    CHECK(created->status == 201);
    auto sid = body_of(created)["session_id"].get<std::string>();
    CHECK(body_of(created)["graph"]["nodes"].size() == 1);

    auto ex = body_of(h.post("/api/sessions/" + sid + "/expand", json{{"node", 9999}, {"direction", "references"}}));
    CHECK(ex["result"]["added_papers"].size() == 5);
    CHECK(ex["graph"]["nodes"].size() == 6);
    CHECK(ex["graph"]["edges"].size() == 5);
    for (const auto& e : ex["graph"]["edges"]) CHECK(e["source"] == 9999);

    ex = body_of(h.post("/api/sessions/" + sid + "/expand",
                        json{{"node", 9999}, {"direction", "citations"}, {"batch_size", 2}}));
    CHECK(ex["graph"]["nodes"].size() == 8);

    auto seeded = body_of(h.post("/api/sessions/" + sid + "/seed", json{{"corpus_id", 1001}}));
    CHECK(seeded["added"] == true);
    CHECK(seeded["graph"]["nodes"].size() == 9);

    auto styled = h.http->Patch("/api/sessions/" + sid + "/style", json{{"node_size_range", {1, 20}}}.dump(),
                                "application/json");
    REQUIRE(styled);
    CHECK(styled->status == 200);
    CHECK(json::parse(styled->body)["style"]["node_size_range"] == json{1.0, 20.0});
    auto bad_style = h.http->Patch("/api/sessions/" + sid + "/style", json{{"node_size_domain", {5, 1}}}.dump(),
                                   "application/json");
    check_error(bad_style, 400, "InvalidArgument");
    CHECK(json::parse(bad_style->body)["detail"] == "node_size_domain");

    body_of(h.post("/api/sessions/" + sid + "/pin",
                                 json{{"corpus_id", 9999}, {"pinned", true}, {"x", 5}, {"y", 6}}));
    auto laid = body_of(h.post("/api/sessions/" + sid + "/layout", json{{"seed", 3}, {"iterations", 50}}));
    for (const auto& n : laid["nodes"]) {
        if (n["corpus_id"] == 9999) {
            CHECK(n["x"] == 5.0);
            CHECK(n["y"] == 6.0);
            CHECK(n["pinned"] == true);
        }
    }

    auto snap = h.http->Get("/api/sessions/" + sid + "/snapshot?name=mine");
    REQUIRE(snap);
    CHECK(snap->status == 200);
    auto loaded = deserialize(snap->body);
    CHECK(loaded.snapshot.name == "mine");
    CHECK(loaded.snapshot.nodes.size() == 9);
    CHECK(loaded.snapshot.edges.size() == 7);
    CHECK(snap->get_header_value("Content-Disposition").find(".argoscholar.json") != std::string::npos);

    // publish, reopen by share id, same graph
    auto share = body_of(h.post("/api/snapshots", snap->body))["share_id"].get<std::string>();
    auto reopened = body_of(h.post("/api/sessions", json{{"share_id", share}}));
    CHECK(reopened["graph"]["nodes"].size() == 9);
    CHECK(reopened["graph"]["edges"] == body_of(h.http->Get("/api/sessions/" + sid + "/graph"))["edges"]);

    // a snapshot body opens directly too
    auto direct = h.post("/api/sessions", snap->body);
    CHECK(direct->status == 201);

    auto del = h.http->Delete("/api/sessions/" + sid);
    REQUIRE(del);
    CHECK(del->status == 204);
    check_error(h.http->Get("/api/sessions/" + sid + "/graph"), 404, "UnknownSession");
}

TEST_CASE("session request errors") {
    Harness h;
    auto sid = body_of(h.post("/api/sessions", json::object()))["session_id"].get<std::string>();
    check_error(h.post("/api/sessions/" + sid + "/expand", json{{"node", 9999}, {"direction", "references"}}), 404,
                "UnknownPaper");
    check_error(h.post("/api/sessions/" + sid + "/expand", json{{"direction", "references"}}), 400,
                "InvalidArgument");
    check_error(h.post("/api/sessions/" + sid + "/seed", json{{"corpus_id", 123456789}}), 404, "NotFound");
    check_error(h.post("/api/sessions/" + sid + "/seed", std::string("[")), 400, "InvalidArgument");
    check_error(h.post("/api/sessions", json{{"share_id", "AAAAAAAAAAAA"}}), 404, "UnknownShareId");
    check_error(h.post("/api/sessions/" + sid + "/pin", json{{"corpus_id", 5}, {"pinned", true}}), 404,
                "UnknownPaper");
}

TEST_CASE("upstream trouble maps to 502 and 429") {
    auto faulty = std::make_shared<argo::test::FaultyTransport>(argo::test::replay());
    Harness h({}, faulty);
    faulty->fail_on(1, argo::test::FaultyTransport::Mode::status_429);
    auto r = h.post("/api/sessions", json{{"corpus_id", 9999}});
    check_error(r, 429, "RateLimited");
    CHECK(r->get_header_value("Retry-After") == "7");
}

TEST_CASE("a concurrent change to the same session is 409 Busy") {
    auto gate = std::make_shared<argo::test::GatedTransport>(argo::test::replay());
    Harness h({}, gate);
    auto sid = body_of(h.post("/api/sessions", json{{"corpus_id", 9999}}))["session_id"].get<std::string>();
    gate->close();
    auto slow = std::async(std::launch::async, [&] {
        httplib::Client c("127.0.0.1", h.server->port());
        c.set_read_timeout(10, 0);
        return c.Post("/api/sessions/" + sid + "/expand", json{{"node", 9999}, {"direction", "refs"}}.dump(),
                      "application/json");
    });
    REQUIRE(gate->wait_for_waiter(std::chrono::seconds(5)));
    check_error(h.post("/api/sessions/" + sid + "/expand", json{{"node", 9999}, {"direction", "cites"}}), 409, "Busy");
    auto read = h.http->Get("/api/sessions/" + sid + "/graph");
    REQUIRE(read);
    CHECK(read->status == 200);
    CHECK(json::parse(read->body)["nodes"].size() == 1);
    gate->release();
    auto done = slow.get();
    REQUIRE(done);
    CHECK(done->status == 200);
    CHECK(json::parse(done->body)["graph"]["nodes"].size() == 6);
}

TEST_CASE("placeholder UI at the root") {
    Harness h;
    auto r = h.http->Get("/");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type").starts_with("text/html"));
}

} // TEST_SUITE
