#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "argo/error.hpp"
#include "argo/explore.hpp"
#include "argo/graph.hpp"
#include "argo/snapshot.hpp"
#include "argo/transport.hpp"

namespace argo::test {

std::filesystem::path fixtures_dir();
std::filesystem::path cli_path();

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

Paper make_paper(std::int64_t id);

// ---- PageRank oracle ------------------------------------------------------

// Dense Google-matrix power iteration, written independently of the engine:
// builds G = d * S + (1 - d) / n * 11^T with dangling columns of S set to 1/n
// and multiplies until the L-inf change is below 1e-15 (or 10000 steps).
std::vector<double> dense_pagerank(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   double damping = 0.85);

struct RandomGraph {
    std::vector<std::int64_t> ids;                            // sorted
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // indices into ids
    CitationNetwork network;
};

// 1..max_nodes nodes with random positive ids, up to max_edges distinct
// non-loop edges.
RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_edges);

// ---- snapshot generator ---------------------------------------------------

// A valid snapshot with random metadata (unicode, nulls, empty strings),
// coordinates, pins, edges, cursors and style.
Snapshot random_snapshot(std::mt19937_64& rng, std::size_t max_nodes = 12);

// Same document with nodes, edges and cursors shuffled.
Snapshot shuffled(Snapshot s, std::mt19937_64& rng);

// One invariant-breaking edit of a valid serialized snapshot, with the error
// code and document path the loader must report.
struct FaultCase {
    std::string name;
    std::string text;
    Errc code;
    std::string path;
};

// Every applicable single fault for `snapshot`: a dangling edge, a duplicate
// node id, a self-loop, a duplicate edge, a node dropped while still
// referenced, bad versions, a missing required field, a wrongly typed field,
// truncated JSON.
std::vector<FaultCase> single_faults(const Snapshot& snapshot, std::mt19937_64& rng);

// ---- transports -----------------------------------------------------------

// Wraps another transport. `fail_on(n)` makes the n-th send (1-based,
// counted from the call) fail; `fail_when` fails every request it matches.
class FaultyTransport final : public Transport {
public:
    enum class Mode { status_500, status_429, transport_failure, garbage };

    explicit FaultyTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}

    ApiResponse send(const ApiRequest& request) override;

    void fail_on(std::size_t nth, Mode mode);
    void fail_when(std::function<bool(const ApiRequest&)> pred, Mode mode);
    void clear();
    std::size_t sends() const noexcept { return sends_.load(); }
    std::vector<ApiRequest> log() const;

private:
    std::shared_ptr<Transport> inner_;
    mutable std::mutex mutex_;
    std::atomic<std::size_t> sends_{0};
    std::size_t fail_at_ = 0;
    std::function<bool(const ApiRequest&)> pred_;
    Mode mode_ = Mode::status_500;
    std::vector<ApiRequest> log_;
};

// Blocks every send until release() is called; used to hold a request in flight.
class GatedTransport final : public Transport {
public:
    explicit GatedTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}

    ApiResponse send(const ApiRequest& request) override;

    void close();
    void release();
    // Waits until at least one send is parked at the gate.
    bool wait_for_waiter(std::chrono::milliseconds timeout);

private:
    std::shared_ptr<Transport> inner_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool open_ = true;
    int waiting_ = 0;
};

std::shared_ptr<Transport> replay();

// Full upstream listing for one fixture paper: every linked CorpusID (nulls
// dropped) in upstream order, read straight from the fixture files.
std::vector<std::int64_t> fixture_listing(std::int64_t id, Direction direction);

// Papers in the fixture manifest that have a recorded paper response.
std::vector<std::int64_t> fixture_papers();

// ---- processes ------------------------------------------------------------

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

CommandResult run(const std::string& command);

// Bytes of canonical form of the whole exploration, for before/after checks.
std::string fingerprint(const Exploration& state);

} // namespace argo::test
