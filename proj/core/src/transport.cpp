#include "argo/transport.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "argo/error.hpp"

namespace argo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Endpoint endpoint) noexcept {
    switch (endpoint) {
    case Endpoint::paper: return "paper";
    case Endpoint::references: return "references";
    case Endpoint::citations: return "citations";
    }
    return "paper";
}

std::string ApiRequest::fixture_name() const {
    return fmt::format("{}_{}_{}_{}.json", to_string(endpoint), raw(id), offset, limit);
}

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::upstream_error, fmt::format("cannot read fixture {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ApiResponse not_found(const ApiRequest& request) {
    json body = {{"error", fmt::format("Paper with id CorpusId:{} not found", raw(request.id))}};
    return {404, body.dump(), std::nullopt};
}

} // namespace

ReplayTransport::ReplayTransport(fs::path fixtures_dir) : dir_(std::move(fixtures_dir)) {
    auto manifest_path = dir_ / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(slurp(manifest_path));
        for (const auto& entry : manifest.at("recordings")) {
            ApiRequest key;
            auto endpoint = entry.at("endpoint").get<std::string>();
            if (endpoint == "paper") {
                key.endpoint = Endpoint::paper;
            } else if (endpoint == "references") {
                key.endpoint = Endpoint::references;
            } else if (endpoint == "citations") {
                key.endpoint = Endpoint::citations;
            } else {
                continue;
            }
            key.id = corpus_id(entry.at("corpus_id").get<std::int64_t>());
            key.offset = entry.at("offset").get<int>();
            key.limit = entry.at("limit").get<int>();
            recordings_[key.fixture_name()] = {entry.at("file").get<std::string>(),
                                               entry.value("status", 200)};
        }
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument,
                    fmt::format("bad fixture manifest {}: {}", manifest_path.string(), e.what()));
    }
}

std::string ReplayTransport::read(const std::string& file) const { return slurp(dir_ / file); }

ApiResponse ReplayTransport::send(const ApiRequest& request) {
    if (auto it = recordings_.find(request.fixture_name()); it != recordings_.end()) {
        return {it->second.status, read(it->second.file), std::nullopt};
    }
    auto paper_key = ApiRequest{Endpoint::paper, request.id, 0, 0}.fixture_name();
    auto paper_it = recordings_.find(paper_key);
    if (paper_it == recordings_.end() || paper_it->second.status == 404) return not_found(request);
    if (request.endpoint == Endpoint::paper) {
        return {paper_it->second.status, read(paper_it->second.file), std::nullopt};
    }

    // Derive the page from the nested lists of the paper recording.
    json paper = json::parse(read(paper_it->second.file), nullptr, false);
    const char* list_key = request.endpoint == Endpoint::references ? "references" : "citations";
    const char* item_key = request.endpoint == Endpoint::references ? "citedPaper" : "citingPaper";
    if (paper.is_discarded() || !paper.contains(list_key) || !paper[list_key].is_array()) {
        throw Error(Errc::upstream_error, "no recording for " + request.fixture_name());
    }
    const auto& items = paper[list_key];
    const auto total = static_cast<int>(items.size());
    json page = {{"offset", request.offset}, {"data", json::array()}};
    for (int i = request.offset; i < std::min(total, request.offset + request.limit); ++i) {
        page["data"].push_back({{item_key, items[static_cast<std::size_t>(i)]}});
    }
    if (request.offset + request.limit < total) page["next"] = request.offset + request.limit;
    return {200, page.dump(), std::nullopt};
}

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner, fs::path fixtures_dir)
    : inner_(std::move(inner)), dir_(std::move(fixtures_dir)) {
    fs::create_directories(dir_);
    auto manifest_path = dir_ / "manifest.json";
    if (fs::exists(manifest_path)) {
        json manifest = json::parse(slurp(manifest_path), nullptr, false);
        if (!manifest.is_discarded() && manifest.contains("recordings")) {
            for (const auto& entry : manifest["recordings"]) {
                auto endpoint = entry.value("endpoint", "");
                ApiRequest key;
                key.endpoint = endpoint == "references"  ? Endpoint::references
                               : endpoint == "citations" ? Endpoint::citations
                                                         : Endpoint::paper;
                key.id = corpus_id(entry.value("corpus_id", std::int64_t{0}));
                key.offset = entry.value("offset", 0);
                key.limit = entry.value("limit", 0);
                recorded_[key] = entry.value("status", 200);
            }
        }
    }
}

ApiResponse RecordingTransport::send(const ApiRequest& request) {
    auto response = inner_->send(request);
    bool keep = (response.status >= 200 && response.status < 300) || response.status == 404;
    if (!keep) return response;

    std::lock_guard lock(mutex_);
    std::ofstream(dir_ / request.fixture_name(), std::ios::binary) << response.body;
    recorded_[request] = response.status;
    write_manifest_locked();
    return response;
}

void RecordingTransport::write_manifest_locked() {
    json recordings = json::array();
    for (const auto& [req, status] : recorded_) {
        recordings.push_back({{"endpoint", to_string(req.endpoint)},
                              {"corpus_id", raw(req.id)},
                              {"offset", req.offset},
                              {"limit", req.limit},
                              {"status", status},
                              {"file", req.fixture_name()}});
    }
    json manifest = {{"version", 1}, {"source", "recorded"}, {"recordings", recordings}};
    auto tmp = dir_ / "manifest.json.tmp";
    std::ofstream(tmp) << manifest.dump(1) << '\n';
    fs::rename(tmp, dir_ / "manifest.json");
}

} // namespace argo
