#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace argo {

// First 72 bits of SHA-256(bytes) in unpadded base64url: 12 characters from
// [A-Za-z0-9_-].
std::string share_token(std::string_view bytes);

bool is_share_token(std::string_view s) noexcept;

struct ShareRecord {
    std::string share_id;
    std::string bytes;  // canonical snapshot JSON
    std::chrono::sys_seconds created_at{};
    std::size_t size_bytes = 0;

    bool operator==(const ShareRecord&) const = default;
};

struct ShareStoreOptions {
    // Records older than this are no longer served. Empty keeps them forever.
    std::optional<std::chrono::seconds> retention;
    std::function<std::chrono::sys_seconds()> now;
};

// Append-only storage of published snapshots. put() is idempotent: the same
// bytes always come back with the same id and the original created_at.
// Implementations are safe for concurrent use.
class ShareStore {
public:
    virtual ~ShareStore() = default;

    virtual ShareRecord put(std::string canonical_bytes) = 0;
    virtual std::optional<ShareRecord> get(std::string_view share_id) const = 0;
    virtual std::size_t size() const = 0;
};

// One {share_id}.json file per record plus an append-only index.jsonl with
// the id, creation time and size of each record.
class FileShareStore final : public ShareStore {
public:
    explicit FileShareStore(std::filesystem::path dir, ShareStoreOptions options = {});

    ShareRecord put(std::string canonical_bytes) override;
    std::optional<ShareRecord> get(std::string_view share_id) const override;
    std::size_t size() const override;

private:
    struct Entry {
        std::chrono::sys_seconds created_at;
        std::size_t size_bytes;
    };

    std::filesystem::path dir_;
    ShareStoreOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, Entry, std::less<>> index_;
};

// Single-file SQLite database, for deployments that want one artifact.
class SqliteShareStore final : public ShareStore {
public:
    explicit SqliteShareStore(const std::filesystem::path& db_path, ShareStoreOptions options = {});
    ~SqliteShareStore() override;

    SqliteShareStore(const SqliteShareStore&) = delete;
    SqliteShareStore& operator=(const SqliteShareStore&) = delete;

    ShareRecord put(std::string canonical_bytes) override;
    std::optional<ShareRecord> get(std::string_view share_id) const override;
    std::size_t size() const override;

private:
    struct Db;
    std::unique_ptr<Db> db_;
    ShareStoreOptions options_;
};

class MemoryShareStore final : public ShareStore {
public:
    explicit MemoryShareStore(ShareStoreOptions options = {});

    ShareRecord put(std::string canonical_bytes) override;
    std::optional<ShareRecord> get(std::string_view share_id) const override;
    std::size_t size() const override;

private:
    ShareStoreOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, ShareRecord, std::less<>> records_;
};

} // namespace argo
