#include "support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "argo/error.hpp"

namespace argo::test {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fixtures_dir() { return ARGO_TEST_FIXTURES_DIR; }
fs::path cli_path() { return ARGO_TEST_CLI_PATH; }

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            fmt::format("argo-test-{}-{}-{}", ::getpid(), counter++, rd());
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Paper make_paper(std::int64_t id) {
    Paper p;
    p.corpus_id = corpus_id(id);
    p.title = fmt::format("Paper {}", id);
    p.authors = {"A. Author"};
    p.year = 2000 + static_cast<int>(id % 25);
    p.citation_count = id % 1000;
    p.url = fmt::format("https://www.semanticscholar.org/paper/{}", id);
    return p;
}

std::vector<double> dense_pagerank(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   double damping) {
    // S[i][j] = probability of stepping from j to i.
    std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
    std::vector<std::size_t> outdeg(n, 0);
    for (auto [from, to] : edges) ++outdeg[from];
    for (auto [from, to] : edges) S[to][from] += 1.0 / static_cast<double>(outdeg[from]);
    for (std::size_t j = 0; j < n; ++j) {
        if (outdeg[j] == 0) {
            for (std::size_t i = 0; i < n; ++i) S[i][j] = 1.0 / static_cast<double>(n);
        }
    }
    std::vector<std::vector<double>> G(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            G[i][j] = damping * S[i][j] + (1.0 - damping) / static_cast<double>(n);
        }
    }
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
    for (int step = 0; step < 10000; ++step) {
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += G[i][j] * x[j];
            y[i] = acc;
        }
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(y[i] - x[i]));
        x.swap(y);
        if (delta < 1e-15) break;
    }
    double sum = 0.0;
    for (double v : x) sum += v;
    for (double& v : x) v /= sum;
    return x;
}

RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_edges) {
    RandomGraph g;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_nodes)(rng);
    std::set<std::int64_t> ids;
    std::uniform_int_distribution<std::int64_t> id_dist(1, 1'000'000'000);
    while (ids.size() < n) ids.insert(id_dist(rng));
    g.ids.assign(ids.begin(), ids.end());

    std::size_t possible = n * (n - 1);
    std::size_t m = std::uniform_int_distribution<std::size_t>(0, std::min(max_edges, possible))(rng);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (chosen.size() < m) {
        auto a = pick(rng), b = pick(rng);
        if (a != b) chosen.insert({a, b});
    }
    g.edges.assign(chosen.begin(), chosen.end());

    std::vector<Paper> papers;
    for (auto id : g.ids) papers.push_back(make_paper(id));
    std::vector<CitationEdge> edges;
    for (auto [a, b] : g.edges) edges.push_back({corpus_id(g.ids[a]), corpus_id(g.ids[b])});
    g.network.merge(std::move(papers), edges);
    return g;
}

namespace {

std::string random_text(std::mt19937_64& rng, bool allow_empty) {
    static const std::array<std::string, 14> pieces = {
        "graph", "citation", "Übersicht", "réseau", "网络", "論文", " ", "\"quoted\"",
        "back\\slash", "tab\t", "newline\n", "emoji 📚", "α-β", "x"};
    std::size_t count = std::uniform_int_distribution<std::size_t>(allow_empty ? 0 : 1, 5)(rng);
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        out += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
    }
    return out;
}

double random_coord(std::mt19937_64& rng) {
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return 0.0;
    case 1: return -0.0;
    case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    default: return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    }
}

bool coin(std::mt19937_64& rng) { return std::bernoulli_distribution(0.5)(rng); }

} // namespace

Snapshot random_snapshot(std::mt19937_64& rng, std::size_t max_nodes) {
    Snapshot s;
    s.name = random_text(rng, true);
    s.created_at = std::chrono::sys_seconds(
        std::chrono::seconds(std::uniform_int_distribution<std::int64_t>(0, 4'102'444'799)(rng)));
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_nodes)(rng);
    std::set<std::int64_t> ids;
    while (ids.size() < n) ids.insert(std::uniform_int_distribution<std::int64_t>(1, 1LL << 40)(rng));
    for (auto id : ids) {
        SnapshotNode node;
        auto& p = node.paper;
        p.corpus_id = corpus_id(id);
        p.title = random_text(rng, false);
        if (coin(rng)) p.abstract = random_text(rng, true);
        std::size_t authors = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
        for (std::size_t k = 0; k < authors; ++k) p.authors.push_back(random_text(rng, true));
        if (coin(rng)) p.year = std::uniform_int_distribution<int>(1900, 2030)(rng);
        if (coin(rng)) p.venue = random_text(rng, true);
        p.citation_count = std::uniform_int_distribution<std::int64_t>(0, 1'000'000)(rng);
        p.url = coin(rng) ? fmt::format("https://www.semanticscholar.org/paper/{}", id) : "";
        node.x = random_coord(rng);
        node.y = random_coord(rng);
        node.pinned = coin(rng);
        s.nodes.push_back(std::move(node));
    }
    if (n >= 2) {
        std::vector<std::int64_t> v(ids.begin(), ids.end());
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::size_t m = std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
        std::set<CitationEdge> edges;
        for (std::size_t k = 0; k < m; ++k) {
            auto a = pick(rng), b = pick(rng);
            if (a != b) edges.insert({corpus_id(v[a]), corpus_id(v[b])});
        }
        s.edges.assign(edges.begin(), edges.end());
        for (auto id : v) {
            for (auto dir : {Direction::references, Direction::citations}) {
                if (std::bernoulli_distribution(0.25)(rng)) {
                    auto strategy = static_cast<Strategy>(std::uniform_int_distribution<int>(0, 2)(rng));
                    s.cursors.push_back({corpus_id(id), dir, std::uniform_int_distribution<int>(0, 500)(rng),
                                         strategy});
                }
            }
        }
    }
    auto& st = s.style;
    st.color_attribute = static_cast<NodeAttribute>(std::uniform_int_distribution<int>(0, 4)(rng));
    st.size_attribute = static_cast<NodeAttribute>(std::uniform_int_distribution<int>(0, 4)(rng));
    double lo = std::uniform_real_distribution<double>(-100, 100)(rng);
    st.color_domain = {lo, lo + std::uniform_real_distribution<double>(0, 1000)(rng)};
    st.size_domain = {lo, coin(rng) ? lo : lo + 3.25};
    st.size_range = {1.5, std::uniform_real_distribution<double>(1.5, 40)(rng)};
    auto channel = [&] { return static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 255)(rng)); };
    st.color_range = {Rgb{channel(), channel(), channel()}, Rgb{channel(), channel(), channel()}};
    st.show_labels = coin(rng);
    st.label_max_chars = std::uniform_int_distribution<int>(1, 120)(rng);
    st.show_edge_direction = coin(rng);
    return s;
}

Snapshot shuffled(Snapshot s, std::mt19937_64& rng) {
    std::shuffle(s.nodes.begin(), s.nodes.end(), rng);
    std::shuffle(s.edges.begin(), s.edges.end(), rng);
    std::shuffle(s.cursors.begin(), s.cursors.end(), rng);
    return s;
}

std::vector<FaultCase> single_faults(const Snapshot& snapshot, std::mt19937_64& rng) {
    const json doc = json::parse(serialize(snapshot));
    std::vector<FaultCase> out;
    auto add = [&](std::string name, const json& d, Errc code, std::string path) {
        out.push_back({std::move(name), d.dump(2), code, std::move(path)});
    };
    const auto& nodes = doc["nodes"];
    const auto& edges = doc["edges"];
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    auto edge_path = [](std::size_t i) { return fmt::format("edges[{}]", i); };

    if (!nodes.empty()) {
        auto d = doc;
        std::int64_t missing = 1;
        std::set<std::int64_t> ids;
        for (const auto& n : nodes) ids.insert(n["corpus_id"].get<std::int64_t>());
        while (ids.contains(missing)) ++missing;
        d["edges"].push_back({{"source", nodes[pick(nodes.size())]["corpus_id"]}, {"target", missing}});
        add("dangling edge", d, Errc::invalid_snapshot, edge_path(edges.size()));

        d = doc;
        d["nodes"].push_back(nodes[pick(nodes.size())]);
        add("duplicate id", d, Errc::invalid_snapshot, fmt::format("nodes[{}].corpus_id", nodes.size()));

        d = doc;
        auto self = nodes[pick(nodes.size())]["corpus_id"];
        d["edges"].push_back({{"source", self}, {"target", self}});
        add("self-loop", d, Errc::invalid_snapshot, edge_path(edges.size()));

        d = doc;
        d["nodes"][pick(nodes.size())].erase("title");
        {
            auto i = 0u;
            while (d["nodes"][i].contains("title")) ++i;
            add("missing title", d, Errc::invalid_snapshot, fmt::format("nodes[{}].title", i));
        }

        d = doc;
        auto k = pick(nodes.size());
        d["nodes"][k]["x"] = "left";
        add("mistyped coordinate", d, Errc::invalid_snapshot, fmt::format("nodes[{}].x", k));
    }
    if (!edges.empty()) {
        auto d = doc;
        d["edges"].push_back(edges[pick(edges.size())]);
        add("duplicate edge", d, Errc::invalid_snapshot, edge_path(edges.size()));

        d = doc;
        auto victim = edges[pick(edges.size())]["target"];
        auto& ns = d["nodes"];
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (ns[i]["corpus_id"] == victim) {
                ns.erase(i);
                break;
            }
        }
        std::size_t first = 0;
        while (edges[first]["source"] != victim && edges[first]["target"] != victim) ++first;
        add("dropped referenced node", d, Errc::invalid_snapshot, edge_path(first));
    }
    for (int v : {0, 2, 99}) {
        auto d = doc;
        d["version"] = v;
        add(fmt::format("version {}", v), d, Errc::unsupported_version, "version");
    }
    {
        auto d = doc;
        d["version"] = "1";
        add("string version", d, Errc::invalid_snapshot, "version");
        d.erase("version");
        add("missing version", d, Errc::invalid_snapshot, "version");
    }
    {
        auto text = doc.dump(2);
        auto cut = text.size() / 2;
        out.push_back({"truncated", text.substr(0, cut), Errc::parse_error, ""});
    }
    return out;
}

// ---- transports -----------------------------------------------------------

ApiResponse FaultyTransport::send(const ApiRequest& request) {
    std::size_t nth = ++sends_;
    bool fail = false;
    Mode mode;
    {
        std::lock_guard lock(mutex_);
        log_.push_back(request);
        fail = (fail_at_ != 0 && nth == fail_at_) || (pred_ && pred_(request));
        mode = mode_;
    }
    if (fail) {
        switch (mode) {
        case Mode::status_500: return {500, R"({"message":"Internal Server Error"})", std::nullopt};
        case Mode::status_429: return {429, R"({"message":"Too Many Requests"})", std::chrono::seconds(7)};
        case Mode::transport_failure: throw TransportFailure("connection reset by peer");
        case Mode::garbage: return {200, "<html>not json</html>", std::nullopt};
        }
    }
    return inner_->send(request);
}

void FaultyTransport::fail_on(std::size_t nth, Mode mode) {
    std::lock_guard lock(mutex_);
    fail_at_ = sends_.load() + nth;
    mode_ = mode;
}

void FaultyTransport::fail_when(std::function<bool(const ApiRequest&)> pred, Mode mode) {
    std::lock_guard lock(mutex_);
    pred_ = std::move(pred);
    mode_ = mode;
}

void FaultyTransport::clear() {
    std::lock_guard lock(mutex_);
    fail_at_ = 0;
    pred_ = nullptr;
}

std::vector<ApiRequest> FaultyTransport::log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

ApiResponse GatedTransport::send(const ApiRequest& request) {
    {
        std::unique_lock lock(mutex_);
        ++waiting_;
        cv_.notify_all();
        cv_.wait(lock, [this] { return open_; });
        --waiting_;
    }
    return inner_->send(request);
}

void GatedTransport::close() {
    std::lock_guard lock(mutex_);
    open_ = false;
}

void GatedTransport::release() {
    {
        std::lock_guard lock(mutex_);
        open_ = true;
    }
    cv_.notify_all();
}

bool GatedTransport::wait_for_waiter(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [this] { return waiting_ > 0; });
}

std::shared_ptr<Transport> replay() { return std::make_shared<ReplayTransport>(fixtures_dir()); }

namespace {

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing fixture " + p.string());
    return json::parse(in);
}

} // namespace

std::vector<std::int64_t> fixture_listing(std::int64_t id, Direction direction) {
    const bool refs = direction == Direction::references;
    const char* endpoint = refs ? "references" : "citations";
    const char* key = refs ? "citedPaper" : "citingPaper";
    std::vector<std::int64_t> out;
    int offset = 0;
    for (;;) {
        auto page = read_json(fixtures_dir() / fmt::format("{}_{}_{}_50.json", endpoint, id, offset));
        for (const auto& item : page["data"]) {
            const auto& cid = item[key]["corpusId"];
            if (!cid.is_null()) out.push_back(cid.get<std::int64_t>());
        }
        if (!page.contains("next")) break;
        offset = page["next"].get<int>();
    }
    return out;
}

std::vector<std::int64_t> fixture_papers() {
    auto manifest = read_json(fixtures_dir() / "manifest.json");
    std::vector<std::int64_t> out;
    for (const auto& r : manifest["recordings"]) {
        if (r["endpoint"] == "paper" && r["status"] == 200) out.push_back(r["corpus_id"].get<std::int64_t>());
    }
    std::sort(out.begin(), out.end());
    return out;
}

CommandResult run(const std::string& command) {
    CommandResult result;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return result;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
    int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fingerprint(const Exploration& state) {
    std::ostringstream out;
    out << serialize(to_snapshot(state, "fingerprint", std::chrono::sys_seconds{}));
    for (const auto& [id, m] : state.network.metrics()) {
        out << fmt::format("{} {} {} {:.17g}\n", raw(id), m.in_degree, m.out_degree, m.pagerank);
    }
    for (const auto& [id, p] : state.network.locations()) out << fmt::format("@{} {:a} {:a}\n", raw(id), p.x, p.y);
    return out.str();
}

} // namespace argo::test
