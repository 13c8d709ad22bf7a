#pragma once

#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omh {

// ---- string helpers ----

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Splits "scheme://host:port/path" into pieces; every part optional.
struct UrlParts {
    std::string scheme;  // "http" / "https" / "" when absent
    std::string host;    // lowercased, no port
    std::string port;    // digits or ""
    std::string target;  // path + query, always starts with "/" (defaults to "/")
};
std::optional<UrlParts> split_url(std::string_view url);

// Host key used for politeness bucketing: lowercased hostname without
// port; falls back to the whole string when the URL has no authority.
std::string host_of(std::string_view url);

// ---- time ----

// Seconds since epoch <-> "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(std::int64_t epoch_seconds);
std::optional<std::int64_t> parse_utc(std::string_view iso);

// ---- misc ----

// Replaces invalid UTF-8 sequences with U+FFFD so downstream regex
// extraction always sees decoded text.
std::string sanitize_utf8(std::string_view bytes);

// FNV-1a 64-bit, stable across platforms; used for config digests.
std::uint64_t fnv1a64(std::string_view data);
std::string to_hex(std::uint64_t v);

// RFC 4180 field quoting (only when the field needs it).
std::string csv_field(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

// ---- logging ----

enum class LogLevel { Debug, Info, Warn, Error };

void set_log_level(LogLevel level);
void log(LogLevel level, const std::string& msg);
void log_debug(const std::string& msg);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void log_error(const std::string& msg);

}  // namespace omh
