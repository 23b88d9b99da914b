#pragma once

#include "aisbench/ingest.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aisbench {

struct SqlLimits {
    std::size_t max_rows = 200;
    std::size_t max_bytes = 16 * 1024;
    std::chrono::milliseconds timeout{5000};
};

/// Outcome of one read-only statement. Failures are captured, never thrown.
struct SqlResult {
    bool ok = false;
    std::string error;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    bool truncated = false;
};

/// Why `sql` may not run, judged from its text alone; nullopt if it may.
std::optional<std::string> screen_sql(std::string_view sql);

/// DDL for the dynamic, static and ports tables. Columns and units mirror
/// the normalized CSV files.
std::string_view schema_ddl();

/// "Execute read-only SQL, return rows".
class SqlBackend {
public:
    virtual ~SqlBackend() = default;

    /// Drops and recreates the three tables from `bundle`. Exclusive.
    virtual void load(const DatasetBundle& bundle) = 0;
    /// Each call runs in its own read-only session; safe to call concurrently.
    [[nodiscard]] virtual SqlResult query(std::string_view sql, const SqlLimits& limits) const = 0;
    /// Function and syntax notes for the generation prompt.
    [[nodiscard]] virtual std::string dialect_notes() const = 0;
    /// Digest of schema and every row; unchanged by any read-only statement.
    [[nodiscard]] virtual std::string state_digest() const = 0;
};

/// File-backed SQLite database with a registered `st_distance_m` function.
class SqliteBackend final : public SqlBackend {
public:
    explicit SqliteBackend(std::filesystem::path file);

    void load(const DatasetBundle& bundle) override;
    [[nodiscard]] SqlResult query(std::string_view sql, const SqlLimits& limits) const override;
    [[nodiscard]] std::string dialect_notes() const override;
    [[nodiscard]] std::string state_digest() const override;
    [[nodiscard]] const std::filesystem::path& file() const { return file_; }

private:
    std::filesystem::path file_;
};

/// Opens the backend for one dataset size. Only `sqlite:<directory>` is
/// understood; the database file is `<directory>/size_<n>.sqlite`.
std::unique_ptr<SqlBackend> open_backend(const std::string& url, std::size_t dataset_size);

} // namespace aisbench
