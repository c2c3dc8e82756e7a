#include <doctest.h>

#include <cmath>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "argo/error.hpp"
#include "argo/snapshot.hpp"
#include "support.hpp"

using namespace argo;
using nlohmann::json;

namespace {

Snapshot small() {
    Snapshot s;
    s.name = "demo";
    s.created_at = *parse_timestamp("2024-01-02T03:04:05Z");
    SnapshotNode b;
    b.paper.corpus_id = corpus_id(9);
    b.paper.title = "B";
    b.paper.venue = "V";
    b.paper.url = "u";
    b.x = 2.0000004;
    b.y = -3.5;
    b.pinned = true;
    SnapshotNode a;
    a.paper.corpus_id = corpus_id(7);
    a.paper.title = "A";
    a.paper.authors = {"X"};
    a.paper.year = 2001;
    a.paper.citation_count = 3;
    a.x = -0.0;
    a.y = 1.25;
    s.nodes = {b, a};
    s.edges = {{corpus_id(9), corpus_id(7)}};
    s.cursors = {{corpus_id(9), Direction::citations, 5, Strategy::recency_desc}};
    return s;
}

const char* const kGolden = R"({
  "created_at": "2024-01-02T03:04:05Z",
  "cursors": [
    {
      "corpus_id": 9,
      "direction": "citations",
      "offset": 5,
      "strategy": "recency_desc"
    }
  ],
  "edges": [
    {
      "source": 9,
      "target": 7
    }
  ],
  "name": "demo",
  "nodes": [
    {
      "abstract": null,
      "authors": [
        "X"
      ],
      "citation_count": 3,
      "corpus_id": 7,
      "pinned": false,
      "title": "A",
      "url": "",
      "venue": null,
      "x": 0.000000,
      "y": 1.250000,
      "year": 2001
    },
    {
      "abstract": null,
      "authors": [],
      "citation_count": 0,
      "corpus_id": 9,
      "pinned": true,
      "title": "B",
      "url": "u",
      "venue": "V",
      "x": 2.000000,
      "y": -3.500000,
      "year": null
    }
  ],
  "style": {
    "label_max_chars": 40,
    "node_color_attribute": "citation_count",
    "node_color_domain": [
      0.000000,
      1000.000000
    ],
    "node_color_range": [
      "#c6dbef",
      "#08306b"
    ],
    "node_size_attribute": "citation_count",
    "node_size_domain": [
      0.000000,
      1000.000000
    ],
    "node_size_range": [
      3.000000,
      15.000000
    ],
    "show_edge_direction": true,
    "show_labels": true
  },
  "version": 1
}
)";

Error error_of(std::string_view text) {
    try {
        deserialize(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("document was accepted");
    return Error(Errc::storage_error, "unreachable");
}

} // namespace

TEST_SUITE("snapshot") {

TEST_CASE("canonical bytes match the golden document") {
    CHECK(serialize(small()) == kGolden);
}

TEST_CASE("golden document loads back") {
    auto loaded = deserialize(kGolden);
    CHECK(loaded.warnings.empty());
    CHECK(loaded.snapshot == canonicalize(small()));
    CHECK(std::signbit(loaded.snapshot.nodes[0].x) == false);
}

TEST_CASE("quantize and timestamps") {
    CHECK(quantize(1.0000004) == 1.0);
    CHECK(quantize(1.0000006) == 1.000001);
    CHECK(!std::signbit(quantize(-0.0)));
    CHECK(!std::signbit(quantize(-1e-9)));
    CHECK(format_timestamp(std::chrono::sys_seconds{}) == "1970-01-01T00:00:00Z");
    auto t = parse_timestamp("2030-12-31T23:59:59Z");
    REQUIRE(t);
    CHECK(format_timestamp(*t) == "2030-12-31T23:59:59Z");
    CHECK_FALSE(parse_timestamp("2030-12-31 23:59:59").has_value());
    CHECK_FALSE(parse_timestamp("2030-13-01T00:00:00Z").has_value());
    CHECK_FALSE(parse_timestamp("2030-02-30T00:00:00Z").has_value());
}

TEST_CASE("property: deserialize inverts serialize") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 300; ++i) {
        auto s = argo::test::random_snapshot(rng);
        auto bytes = serialize(s);
        auto loaded = deserialize(bytes);
        CHECK(loaded.warnings.empty());
        CHECK(loaded.snapshot == canonicalize(s));
        CHECK(serialize(loaded.snapshot) == bytes);
    }
}

TEST_CASE("property: bytes do not depend on collection order") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        auto s = argo::test::random_snapshot(rng);
        CHECK(serialize(argo::test::shuffled(s, rng)) == serialize(s));
    }
}

TEST_CASE("property: every single fault is rejected at its path") {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        auto s = argo::test::random_snapshot(rng);
        for (const auto& fault : argo::test::single_faults(s, rng)) {
            CAPTURE(fault.name);
            auto e = error_of(fault.text);
            CHECK(e.code() == fault.code);
            if (!fault.path.empty()) CHECK(e.detail() == fault.path);
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("parse errors carry a byte offset") {
    auto e = error_of("{\"version\": 1,");
    CHECK(e.code() == Errc::parse_error);
    CHECK(e.detail().starts_with("byte "));
    CHECK(error_of("").code() == Errc::parse_error);
    CHECK(error_of("[]").code() == Errc::invalid_snapshot);
}

TEST_CASE("unknown fields are ignored with a warning") {
    auto doc = json::parse(kGolden);
    doc["ui_theme"] = "dark";
    doc["nodes"][1]["color"] = "red";
    auto loaded = deserialize(doc.dump());
    CHECK(loaded.snapshot == canonicalize(small()));
    REQUIRE(loaded.warnings.size() == 2);
    CHECK(loaded.warnings[0].find("ui_theme") != std::string::npos);
    CHECK(loaded.warnings[1].find("nodes[1].color") != std::string::npos);
}

TEST_CASE("optional fields may be omitted") {
    auto doc = json::parse(kGolden);
    doc.erase("cursors");
    doc.erase("name");
    doc["nodes"][0].erase("pinned");
    doc["nodes"][0].erase("abstract");
    auto loaded = deserialize(doc.dump());
    CHECK(loaded.snapshot.cursors.empty());
    CHECK(loaded.snapshot.name.empty());
    CHECK_FALSE(loaded.snapshot.nodes[0].pinned);
}

TEST_CASE("serialize refuses invalid snapshots") {
    auto s = small();
    s.edges.push_back({corpus_id(7), corpus_id(7)});
    CHECK_THROWS_AS(serialize(s), Error);
    s = small();
    s.nodes[0].x = std::nan("");
    CHECK_THROWS_AS(serialize(s), Error);
    s = small();
    s.version = 2;
    CHECK_THROWS_AS(serialize(s), Error);
}

TEST_CASE("cursor faults are located") {
    auto doc = json::parse(kGolden);
    doc["cursors"][0]["corpus_id"] = 12345;
    CHECK(error_of(doc.dump()).detail().starts_with("cursors[0]"));
    doc = json::parse(kGolden);
    doc["cursors"][0]["offset"] = -1;
    CHECK(error_of(doc.dump()).detail() == "cursors[0].offset");
    doc = json::parse(kGolden);
    doc["style"]["node_size_domain"] = {5.0, 1.0};
    CHECK(error_of(doc.dump()).detail() == "style.node_size_domain");
}

} // TEST_SUITE
