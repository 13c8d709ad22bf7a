#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace omh {

// Membership bitmask over the catalogs of one run. Bit i corresponds to
// catalog_order[i]; runs are capped at kMaxCatalogs catalogs.
using Mask = std::uint32_t;
inline constexpr int kMaxCatalogs = 30;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CatalogId {
    std::string id;            // short lowercase token, e.g. "opendoar"
    std::string display_name;  // e.g. "OpenDOAR"

    bool operator==(const CatalogId&) const = default;
};

// Accepts non-empty [a-z0-9_-] tokens only.
bool valid_catalog_token(const std::string& id);

// Throws ConfigError on invalid/duplicate ids or more than kMaxCatalogs.
void validate_catalog_order(const std::vector<CatalogId>& order);

struct RawRepositoryEntry {
    std::string source;   // catalog id token
    std::string raw_url;  // exactly as captured (surrounding whitespace trimmed)
    std::optional<std::string> name;

    bool operator==(const RawRepositoryEntry&) const = default;
};

// Strong-normalized comparison key. Only normalize.hpp's strong_normalize
// produces these; the key never contains "://", a leading "www.", a
// trailing "/" or a query.
struct NormalizedUrl {
    std::string key;

    bool operator==(const NormalizedUrl&) const = default;
    auto operator<=>(const NormalizedUrl&) const = default;
};

struct CatalogSnapshot {
    CatalogId catalog;
    std::int64_t harvested_at = 0;  // UTC epoch seconds
    std::uint64_t all_items = 0;    // every listed item, OAI or not
    std::uint64_t only_oai = 0;     // items that yielded an endpoint URL
    std::vector<std::string> entries_simple;      // probe URLs, deduplicated
    std::vector<NormalizedUrl> entries_strong;    // comparison keys, deduplicated

    bool operator==(const CatalogSnapshot&) const = default;
};

// Builds a snapshot from the simple-normalized deduplicated probe URLs,
// deriving entries_strong and rejecting (with a warning) entries whose
// strong form is empty. Verifies the all_items >= only_oai >= unique chain.
CatalogSnapshot make_snapshot(CatalogId catalog, std::int64_t harvested_at,
                              std::uint64_t all_items, std::uint64_t only_oai,
                              std::vector<std::string> entries_simple);

enum class ProbeOutcome { Reachable, WrongSuccess, HttpError, TransportError };

const char* outcome_name(ProbeOutcome o);
std::optional<ProbeOutcome> outcome_from_name(const std::string& name);

struct ProbeRecord {
    std::string probe_url;    // simple-normalized endpoint
    NormalizedUrl normalized; // strong comparison key of probe_url
    ProbeOutcome outcome = ProbeOutcome::TransportError;
    std::optional<int> http_status;  // absent iff TransportError
    std::optional<std::string> repository_name;
    std::optional<std::string> protocol_version;
    std::optional<std::string> earliest_datestamp;
    int attempts = 1;
    std::int64_t completed_at = 0;  // UTC epoch seconds

    bool operator==(const ProbeRecord&) const = default;
};

struct MembershipMap {
    std::vector<CatalogId> catalog_order;     // fixes bit positions
    std::map<std::string, Mask> entries;      // strong key -> nonzero mask

    std::uint64_t total_distinct() const { return entries.size(); }
    bool operator==(const MembershipMap&) const = default;
};

struct OverlapReport {
    std::vector<CatalogId> catalog_order;
    std::uint64_t total_distinct = 0;
    std::map<Mask, std::uint64_t> region_counts;       // nonzero masks only
    std::vector<std::vector<std::uint64_t>> pairwise;  // zero diagonal
    std::vector<std::uint64_t> per_catalog_total;
    std::vector<std::vector<double>> ratio;            // 2-decimal, zero diagonal
    std::uint64_t specificity_count = 0;
    double specificity_fraction = 0.0;
    std::uint64_t all_common_count = 0;
    std::vector<std::string> all_common_keys;          // sorted ascending

    bool operator==(const OverlapReport&) const = default;
};

// Bit i set iff order[i] is in catalogs. Unknown members raise ConfigError
// naming the offending id.
Mask mask_of(const std::set<std::string>& catalogs, const std::vector<CatalogId>& order);

// "opendoar&roar" style subset name for a mask over order.
std::string subset_name(Mask mask, const std::vector<CatalogId>& order);

}  // namespace omh
