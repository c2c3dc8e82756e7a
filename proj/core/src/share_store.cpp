#include "argo/share_store.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/sha.h>
#include <sqlite3.h>

#include "argo/error.hpp"

namespace argo {

namespace fs = std::filesystem;
using std::chrono::sys_seconds;

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

sys_seconds wall_now() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

sys_seconds now(const ShareStoreOptions& o) { return o.now ? o.now() : wall_now(); }

bool expired(const ShareStoreOptions& o, sys_seconds created_at) {
    return o.retention && now(o) - created_at > *o.retention;
}

[[noreturn]] void collision(std::string_view id) {
    throw Error(Errc::storage_error,
                fmt::format("share id {} already holds different content", id), std::string(id));
}

} // namespace

std::string share_token(std::string_view bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest.data());
    // 9 bytes = 72 bits = exactly 12 sextets
    std::string out;
    out.reserve(12);
    for (std::size_t i = 0; i < 9; i += 3) {
        std::uint32_t v = (std::uint32_t{digest[i]} << 16) | (std::uint32_t{digest[i + 1]} << 8) |
                          digest[i + 2];
        for (int shift = 18; shift >= 0; shift -= 6) out += kAlphabet[(v >> shift) & 0x3f];
    }
    return out;
}

bool is_share_token(std::string_view s) noexcept {
    if (s.size() != 12) return false;
    for (char c : s) {
        if (kAlphabet.find(c) == std::string_view::npos) return false;
    }
    return true;
}

// ---- filesystem ------------------------------------------------------------

FileShareStore::FileShareStore(fs::path dir, ShareStoreOptions options)
    : dir_(std::move(dir)), options_(std::move(options)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
        throw Error(Errc::storage_error, fmt::format("cannot create {}: {}", dir_.string(), ec.message()),
                    dir_.string());
    }
    std::ifstream in(dir_ / "index.jsonl");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("share_id")) {
            // A torn final line after a crash is expected; anything else is not.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw Error(Errc::storage_error, fmt::format("index.jsonl line {} is corrupt", lineno),
                        (dir_ / "index.jsonl").string());
        }
        index_.insert_or_assign(j["share_id"].get<std::string>(),
                                Entry{sys_seconds(std::chrono::seconds(j.value("created_at", 0LL))),
                                      j.value("size_bytes", std::size_t{0})});
    }
}

ShareRecord FileShareStore::put(std::string bytes) {
    auto id = share_token(bytes);
    std::lock_guard lock(mutex_);
    auto file = dir_ / (id + ".json");
    if (auto it = index_.find(id); it != index_.end()) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream existing;
        existing << in.rdbuf();
        if (in && existing.str() != bytes) collision(id);
        if (in) return {id, std::move(bytes), it->second.created_at, it->second.size_bytes};
        // File lost underneath the index: rewrite it below.
    }

    auto tmp = dir_ / (id + ".json.tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out.flush()) throw Error(Errc::storage_error, "write failed", tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);
    if (ec) throw Error(Errc::storage_error, fmt::format("rename failed: {}", ec.message()), file.string());

    Entry entry{now(options_), bytes.size()};
    std::ofstream index(dir_ / "index.jsonl", std::ios::app);
    index << nlohmann::json{{"share_id", id},
                            {"created_at", entry.created_at.time_since_epoch().count()},
                            {"size_bytes", entry.size_bytes}}
                 .dump()
          << '\n';
    if (!index.flush()) throw Error(Errc::storage_error, "index append failed", (dir_ / "index.jsonl").string());
    index_.insert_or_assign(id, entry);
    return {id, std::move(bytes), entry.created_at, entry.size_bytes};
}

std::optional<ShareRecord> FileShareStore::get(std::string_view share_id) const {
    if (!is_share_token(share_id)) return std::nullopt;
    std::lock_guard lock(mutex_);
    auto it = index_.find(share_id);
    if (it == index_.end() || expired(options_, it->second.created_at)) return std::nullopt;
    std::ifstream in(dir_ / (std::string(share_id) + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream bytes;
    bytes << in.rdbuf();
    return ShareRecord{std::string(share_id), bytes.str(), it->second.created_at, it->second.size_bytes};
}

std::size_t FileShareStore::size() const {
    std::lock_guard lock(mutex_);
    return index_.size();
}

// ---- sqlite ----------------------------------------------------------------

struct SqliteShareStore::Db {
    sqlite3* handle = nullptr;
    std::mutex mutex;

    ~Db() { sqlite3_close(handle); }

    [[noreturn]] void fail(const char* what) const {
        throw Error(Errc::storage_error, fmt::format("{}: {}", what, sqlite3_errmsg(handle)));
    }

    void exec(const char* sql) {
        char* err = nullptr;
        if (sqlite3_exec(handle, sql, nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown";
            sqlite3_free(err);
            throw Error(Errc::storage_error, msg);
        }
    }
};

namespace {

class Statement {
public:
    Statement(sqlite3* db, const char* sql) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
            throw Error(Errc::storage_error, sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    sqlite3_stmt* get() const noexcept { return stmt_; }

private:
    sqlite3_stmt* stmt_ = nullptr;
};

std::optional<ShareRecord> select_record(sqlite3* db, std::string_view id) {
    Statement st(db, "SELECT bytes, created_at FROM shares WHERE share_id = ?1");
    sqlite3_bind_text(st.get(), 1, id.data(), static_cast<int>(id.size()), SQLITE_TRANSIENT);
    int rc = sqlite3_step(st.get());
    if (rc == SQLITE_DONE) return std::nullopt;
    if (rc != SQLITE_ROW) throw Error(Errc::storage_error, sqlite3_errmsg(db));
    const auto* data = static_cast<const char*>(sqlite3_column_blob(st.get(), 0));
    std::string bytes(data ? data : "", static_cast<std::size_t>(sqlite3_column_bytes(st.get(), 0)));
    auto created = sys_seconds(std::chrono::seconds(sqlite3_column_int64(st.get(), 1)));
    auto size = bytes.size();
    return ShareRecord{std::string(id), std::move(bytes), created, size};
}

} // namespace

SqliteShareStore::SqliteShareStore(const fs::path& db_path, ShareStoreOptions options)
    : db_(std::make_unique<Db>()), options_(std::move(options)) {
    if (db_path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(db_path.parent_path(), ec);
    }
    if (sqlite3_open_v2(db_path.c_str(), &db_->handle,
                        SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
        db_->fail("open");
    }
    sqlite3_busy_timeout(db_->handle, 5000);
    db_->exec("PRAGMA journal_mode=WAL");
    db_->exec(
        "CREATE TABLE IF NOT EXISTS shares ("
        " share_id TEXT PRIMARY KEY,"
        " created_at INTEGER NOT NULL,"
        " bytes BLOB NOT NULL)");
}

SqliteShareStore::~SqliteShareStore() = default;

ShareRecord SqliteShareStore::put(std::string bytes) {
    auto id = share_token(bytes);
    std::lock_guard lock(db_->mutex);
    if (auto existing = select_record(db_->handle, id)) {
        if (existing->bytes != bytes) collision(id);
        return *existing;
    }
    auto created = now(options_);
    Statement st(db_->handle, "INSERT INTO shares (share_id, created_at, bytes) VALUES (?1, ?2, ?3)");
    sqlite3_bind_text(st.get(), 1, id.c_str(), -1, SQLITE_TRANSIENT);
    sqlite3_bind_int64(st.get(), 2, created.time_since_epoch().count());
    sqlite3_bind_blob(st.get(), 3, bytes.data(), static_cast<int>(bytes.size()), SQLITE_TRANSIENT);
    if (sqlite3_step(st.get()) != SQLITE_DONE) db_->fail("insert");
    auto size = bytes.size();
    return {id, std::move(bytes), created, size};
}

std::optional<ShareRecord> SqliteShareStore::get(std::string_view share_id) const {
    if (!is_share_token(share_id)) return std::nullopt;
    std::lock_guard lock(db_->mutex);
    auto record = select_record(db_->handle, share_id);
    if (record && expired(options_, record->created_at)) return std::nullopt;
    return record;
}

std::size_t SqliteShareStore::size() const {
    std::lock_guard lock(db_->mutex);
    Statement st(db_->handle, "SELECT COUNT(*) FROM shares");
    if (sqlite3_step(st.get()) != SQLITE_ROW) db_->fail("count");
    return static_cast<std::size_t>(sqlite3_column_int64(st.get(), 0));
}

// ---- memory ----------------------------------------------------------------

MemoryShareStore::MemoryShareStore(ShareStoreOptions options) : options_(std::move(options)) {}

ShareRecord MemoryShareStore::put(std::string bytes) {
    auto id = share_token(bytes);
    std::lock_guard lock(mutex_);
    if (auto it = records_.find(id); it != records_.end()) {
        if (it->second.bytes != bytes) collision(id);
        return it->second;
    }
    auto size = bytes.size();
    ShareRecord record{id, std::move(bytes), now(options_), size};
    records_.emplace(id, record);
    return record;
}

std::optional<ShareRecord> MemoryShareStore::get(std::string_view share_id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(share_id);
    if (it == records_.end() || expired(options_, it->second.created_at)) return std::nullopt;
    return it->second;
}

std::size_t MemoryShareStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

} // namespace argo
