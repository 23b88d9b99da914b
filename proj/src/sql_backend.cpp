#include "aisbench/sql_backend.hpp"

#include "aisbench/digest.hpp"
#include "aisbench/error.hpp"
#include "aisbench/geo.hpp"
#include "aisbench/text.hpp"

#include <sqlite3.h>

#include <cctype>
#include <cstring>

namespace aisbench {
namespace {

constexpr std::string_view kDdl = R"(CREATE TABLE static (
  mmsi INTEGER PRIMARY KEY,
  name TEXT,
  imo INTEGER,
  length REAL,
  breadth REAL,
  draught REAL,
  ship_type TEXT,
  annual_co2 REAL,
  co2_per_nm REAL
);
CREATE TABLE dynamic (
  mmsi INTEGER NOT NULL,
  time TEXT NOT NULL,
  latitude REAL NOT NULL,
  longitude REAL NOT NULL,
  sog REAL NOT NULL
);
CREATE TABLE ports (
  name TEXT PRIMARY KEY,
  latitude REAL NOT NULL,
  longitude REAL NOT NULL
);
CREATE INDEX dynamic_by_vessel ON dynamic (mmsi, time);
CREATE INDEX dynamic_by_time ON dynamic (time);
)";

// Skips whitespace, `--` and `/* */` comments and, optionally, semicolons.
std::string_view skip_trivia(std::string_view s, bool semicolons) {
    while (!s.empty()) {
        if (std::isspace(static_cast<unsigned char>(s.front())) || (semicolons && s.front() == ';')) {
            s.remove_prefix(1);
        } else if (s.starts_with("--")) {
            const auto nl = s.find('\n');
            s = nl == std::string_view::npos ? std::string_view{} : s.substr(nl + 1);
        } else if (s.starts_with("/*")) {
            const auto end = s.find("*/", 2);
            s = end == std::string_view::npos ? std::string_view{} : s.substr(end + 2);
        } else {
            break;
        }
    }
    return s;
}

struct Db {
    sqlite3* handle = nullptr;
    Db() = default;
    Db(const Db&) = delete;
    Db& operator=(const Db&) = delete;
    ~Db() { sqlite3_close(handle); }
};

struct Stmt {
    sqlite3_stmt* handle = nullptr;
    Stmt() = default;
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;
    ~Stmt() { sqlite3_finalize(handle); }
};

void exec(sqlite3* db, const char* sql) {
    char* message = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &message) != SQLITE_OK) {
        std::string what = message ? message : "unknown error";
        sqlite3_free(message);
        throw BackendError(std::string("sqlite: ") + what);
    }
}

void st_distance_m(sqlite3_context* ctx, int argc, sqlite3_value** argv) {
    for (int i = 0; i < argc; ++i) {
        if (sqlite3_value_type(argv[i]) == SQLITE_NULL) {
            sqlite3_result_null(ctx);
            return;
        }
    }
    const GeoPoint a{sqlite3_value_double(argv[0]), sqlite3_value_double(argv[1])};
    const GeoPoint b{sqlite3_value_double(argv[2]), sqlite3_value_double(argv[3])};
    sqlite3_result_double(ctx, great_circle_distance(a, b));
}

void open(Db& db, const std::filesystem::path& file, int flags) {
    if (sqlite3_open_v2(file.c_str(), &db.handle, flags, nullptr) != SQLITE_OK) {
        const std::string what = db.handle ? sqlite3_errmsg(db.handle) : "out of memory";
        throw BackendError("cannot open " + file.string() + ": " + what +
                           " (run the ingest stage, or check the backend url)");
    }
    sqlite3_extended_result_codes(db.handle, 1);
    sqlite3_create_function(db.handle, "st_distance_m", 4, SQLITE_UTF8 | SQLITE_DETERMINISTIC, nullptr,
                            &st_distance_m, nullptr, nullptr);
}

int authorize(void*, int action, const char* arg1, const char* arg2, const char*, const char*) {
    switch (action) {
    case SQLITE_SELECT:
    case SQLITE_READ:
    case SQLITE_RECURSIVE:
        return SQLITE_OK;
    case SQLITE_FUNCTION:
        return arg2 && sqlite3_stricmp(arg2, "load_extension") == 0 ? SQLITE_DENY : SQLITE_OK;
    default:
        (void)arg1;
        return SQLITE_DENY;
    }
}

struct Deadline {
    std::chrono::steady_clock::time_point at;
    bool hit = false;
};

int check_deadline(void* p) {
    auto* d = static_cast<Deadline*>(p);
    if (std::chrono::steady_clock::now() > d->at) {
        d->hit = true;
        return 1;
    }
    return 0;
}

std::string cell_text(sqlite3_stmt* stmt, int col) {
    switch (sqlite3_column_type(stmt, col)) {
    case SQLITE_NULL: return "NULL";
    case SQLITE_INTEGER: return std::to_string(sqlite3_column_int64(stmt, col));
    case SQLITE_FLOAT: return text::shortest(sqlite3_column_double(stmt, col));
    default: {
        const auto* t = reinterpret_cast<const char*>(sqlite3_column_text(stmt, col));
        return t ? std::string(t, static_cast<std::size_t>(sqlite3_column_bytes(stmt, col))) : std::string{};
    }
    }
}

void bind_optional(sqlite3_stmt* stmt, int index, const std::optional<double>& v) {
    if (v) {
        sqlite3_bind_double(stmt, index, *v);
    } else {
        sqlite3_bind_null(stmt, index);
    }
}

void step_done(sqlite3* db, sqlite3_stmt* stmt) {
    if (sqlite3_step(stmt) != SQLITE_DONE) {
        throw BackendError(std::string("sqlite insert failed: ") + sqlite3_errmsg(db));
    }
    sqlite3_reset(stmt);
}

void prepare(sqlite3* db, const char* sql, Stmt& stmt) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt.handle, nullptr) != SQLITE_OK) {
        throw BackendError(std::string("sqlite: ") + sqlite3_errmsg(db));
    }
}

} // namespace

std::string_view schema_ddl() { return kDdl; }

std::optional<std::string> screen_sql(std::string_view sql) {
    const auto body = skip_trivia(sql, false);
    if (body.empty()) {
        return "empty statement";
    }
    std::size_t n = 0;
    while (n < body.size() && std::isalpha(static_cast<unsigned char>(body[n]))) {
        ++n;
    }
    const auto keyword = text::to_lower(body.substr(0, n));
    if (keyword != "select" && keyword != "with") {
        return "only SELECT statements are allowed, got '" + std::string{body.substr(0, n)} + "'";
    }
    return std::nullopt;
}

SqliteBackend::SqliteBackend(std::filesystem::path file) : file_(std::move(file)) {}

void SqliteBackend::load(const DatasetBundle& bundle) {
    std::error_code ec;
    std::filesystem::create_directories(file_.parent_path(), ec);
    std::filesystem::remove(file_, ec);
    Db db;
    open(db, file_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    exec(db.handle, "PRAGMA journal_mode=OFF; PRAGMA synchronous=OFF;");
    exec(db.handle, "BEGIN");
    exec(db.handle, std::string{kDdl}.c_str());
    {
        Stmt st;
        prepare(db.handle, "INSERT INTO static VALUES (?,?,?,?,?,?,?,?,?)", st);
        for (const auto& s : bundle.statics) {
            sqlite3_bind_int64(st.handle, 1, s.mmsi.value);
            sqlite3_bind_text(st.handle, 2, s.name.c_str(), -1, SQLITE_TRANSIENT);
            if (s.imo) {
                sqlite3_bind_int64(st.handle, 3, *s.imo);
            } else {
                sqlite3_bind_null(st.handle, 3);
            }
            bind_optional(st.handle, 4, s.length);
            bind_optional(st.handle, 5, s.breadth);
            bind_optional(st.handle, 6, s.draught);
            sqlite3_bind_text(st.handle, 7, s.ship_type.c_str(), -1, SQLITE_TRANSIENT);
            bind_optional(st.handle, 8,
                          s.annual_co2_kg ? std::optional<double>(*s.annual_co2_kg / 1000.0) : std::nullopt);
            bind_optional(st.handle, 9, s.co2_per_nm_kg);
            step_done(db.handle, st.handle);
        }
    }
    {
        Stmt st;
        prepare(db.handle, "INSERT INTO dynamic VALUES (?,?,?,?,?)", st);
        for (const auto& t : bundle.dynamic) {
            for (const auto& r : t.records) {
                const auto hhmm = text::hhmm(r.minute);
                sqlite3_bind_int64(st.handle, 1, r.mmsi.value);
                sqlite3_bind_text(st.handle, 2, hhmm.c_str(), -1, SQLITE_TRANSIENT);
                sqlite3_bind_double(st.handle, 3, r.latitude);
                sqlite3_bind_double(st.handle, 4, r.longitude);
                sqlite3_bind_double(st.handle, 5, r.sog);
                step_done(db.handle, st.handle);
            }
        }
    }
    {
        Stmt st;
        prepare(db.handle, "INSERT INTO ports VALUES (?,?,?)", st);
        for (const auto& p : bundle.ports) {
            sqlite3_bind_text(st.handle, 1, p.name.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_double(st.handle, 2, p.position.latitude);
            sqlite3_bind_double(st.handle, 3, p.position.longitude);
            step_done(db.handle, st.handle);
        }
    }
    exec(db.handle, "COMMIT");
}

SqlResult SqliteBackend::query(std::string_view sql, const SqlLimits& limits) const {
    SqlResult out;
    if (auto reason = screen_sql(sql)) {
        out.error = "rejected: " + *reason;
        return out;
    }
    Db db;
    try {
        open(db, file_, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX);
        exec(db.handle, "PRAGMA query_only=1");
    } catch (const BackendError& e) {
        out.error = e.what();
        return out;
    }
    sqlite3_set_authorizer(db.handle, &authorize, nullptr);
    Deadline deadline{std::chrono::steady_clock::now() + limits.timeout};
    sqlite3_progress_handler(db.handle, 1000, &check_deadline, &deadline);

    Stmt stmt;
    const char* tail = nullptr;
    const std::string owned{sql};
    if (sqlite3_prepare_v2(db.handle, owned.c_str(), static_cast<int>(owned.size()), &stmt.handle, &tail) !=
        SQLITE_OK) {
        out.error = deadline.hit ? "statement timed out" : sqlite3_errmsg(db.handle);
        return out;
    }
    if (!stmt.handle) {
        out.error = "rejected: empty statement";
        return out;
    }
    if (!skip_trivia(std::string_view{tail}, true).empty()) {
        out.error = "rejected: multiple statements";
        return out;
    }
    if (!sqlite3_stmt_readonly(stmt.handle)) {
        out.error = "rejected: statement is not read-only";
        return out;
    }
    const int cols = sqlite3_column_count(stmt.handle);
    for (int c = 0; c < cols; ++c) {
        const char* name = sqlite3_column_name(stmt.handle, c);
        out.columns.emplace_back(name ? name : "");
    }
    std::size_t bytes = 0;
    while (true) {
        const int rc = sqlite3_step(stmt.handle);
        if (rc == SQLITE_DONE) {
            break;
        }
        if (rc != SQLITE_ROW) {
            out.error = deadline.hit ? "statement timed out after " + std::to_string(limits.timeout.count()) + " ms"
                                     : sqlite3_errmsg(db.handle);
            out.rows.clear();
            return out;
        }
        if (out.rows.size() >= limits.max_rows) {
            out.truncated = true;
            break;
        }
        std::vector<std::string> row;
        std::size_t row_bytes = 0;
        for (int c = 0; c < cols; ++c) {
            row.push_back(cell_text(stmt.handle, c));
            row_bytes += row.back().size() + 1;
        }
        if (bytes + row_bytes > limits.max_bytes) {
            out.truncated = true;
            break;
        }
        bytes += row_bytes;
        out.rows.push_back(std::move(row));
    }
    out.ok = true;
    return out;
}

std::string SqliteBackend::dialect_notes() const {
    return "SQLite dialect. The function st_distance_m(lat1, lon1, lat2, lon2) returns the great-circle "
           "distance in metres. Times are 'HH:MM' strings on a single day; compare them as text. Window "
           "functions (LAG, LEAD, ROW_NUMBER) and recursive CTEs are available. Only one SELECT statement "
           "is executed.";
}

std::string SqliteBackend::state_digest() const {
    Db db;
    open(db, file_, SQLITE_OPEN_READONLY);
    std::string acc;
    std::vector<std::string> tables;
    {
        Stmt st;
        prepare(db.handle, "SELECT type, name, coalesce(sql, '') FROM sqlite_master ORDER BY type, name", st);
        while (sqlite3_step(st.handle) == SQLITE_ROW) {
            const auto type = cell_text(st.handle, 0);
            acc += type + "|" + cell_text(st.handle, 1) + "|" + cell_text(st.handle, 2) + "\n";
            if (type == "table") {
                tables.push_back(cell_text(st.handle, 1));
            }
        }
    }
    for (const auto& t : tables) {
        Stmt st;
        prepare(db.handle, ("SELECT * FROM \"" + t + "\" ORDER BY rowid").c_str(), st);
        const int cols = sqlite3_column_count(st.handle);
        while (sqlite3_step(st.handle) == SQLITE_ROW) {
            for (int c = 0; c < cols; ++c) {
                acc += cell_text(st.handle, c);
                acc += '\x1f';
            }
            acc += '\n';
        }
    }
    return sha256_hex(acc);
}

std::unique_ptr<SqlBackend> open_backend(const std::string& url, std::size_t dataset_size) {
    constexpr std::string_view scheme = "sqlite:";
    if (!url.starts_with(scheme)) {
        throw BackendError("unsupported backend url '" + url + "'; this build only speaks sqlite:<directory>");
    }
    const std::filesystem::path dir = url.substr(scheme.size());
    return std::make_unique<SqliteBackend>(dir / ("size_" + std::to_string(dataset_size) + ".sqlite"));
}

} // namespace aisbench
