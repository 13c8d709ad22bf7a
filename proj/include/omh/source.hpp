#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "omh/clock.hpp"
#include "omh/model.hpp"
#include "omh/transport.hpp"

namespace omh {

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HarvestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExtractionStep {
    enum class Kind { PatternExtract, LinkFollow };
    Kind kind = Kind::PatternExtract;
    std::string fetch_url;     // absolute URL or "file:<relative path>"; empty for step 2
    std::string pattern_text;  // taken verbatim from the source manifest
    int capture_group = 1;     // 1-based group holding the URL
    std::regex pattern;        // compiled at manifest load, never later
};

struct SourceManifest {
    CatalogId catalog;
    std::vector<ExtractionStep> steps;  // length 1, or 2 as LinkFollow + PatternExtract
    std::string notes;
};

// Parses and validates the whole manifest document (a JSON array of
// sources). Any problem (bad JSON, bad pattern, bad step shape, duplicate
// ids) throws ManifestError naming the offending source.
std::vector<SourceManifest> parse_manifest(const std::string& json_text);
std::vector<SourceManifest> load_manifest(const std::string& path);

// Resolves document references for harvesting. "file:<rel>" resolves
// against a fixtures directory; http(s) goes through a Transport in live
// mode. Both decode to UTF-8 with lossy replacement.
class DocumentFetcher {
public:
    virtual ~DocumentFetcher() = default;
    struct Result {
        bool ok = false;
        std::string text;
        std::string error;
    };
    virtual Result fetch(const std::string& ref) = 0;
};

class FileFetcher : public DocumentFetcher {
public:
    explicit FileFetcher(std::string fixtures_dir) : fixtures_dir_(std::move(fixtures_dir)) {}
    Result fetch(const std::string& ref) override;

private:
    std::string fixtures_dir_;
};

// Live fetcher. Sequential by design (one listing page at a time) with
// per-host dispatch spacing, matching the prober's politeness contract.
// "file:" refs still resolve so pre-rendered pages can be mixed in.
class LiveFetcher : public DocumentFetcher {
public:
    LiveFetcher(Transport& transport, Clock& clock, FetchOptions options,
                std::string fixtures_dir, std::int64_t per_host_delay_ms = 1000,
                int max_redirects = 5)
        : transport_(transport),
          clock_(clock),
          options_(std::move(options)),
          fixtures_dir_(std::move(fixtures_dir)),
          per_host_delay_ms_(per_host_delay_ms),
          max_redirects_(max_redirects) {}
    Result fetch(const std::string& ref) override;

private:
    Transport& transport_;
    Clock& clock_;
    FetchOptions options_;
    std::string fixtures_dir_;
    std::int64_t per_host_delay_ms_;
    int max_redirects_;
    std::map<std::string, TimeMs> host_next_ok_;
};

// Every non-overlapping match's capture group, in document order,
// whitespace-trimmed, empty captures dropped.
std::vector<std::string> extract_entries(const std::string& document, const ExtractionStep& step);

struct FollowResult {
    std::vector<std::string> documents;  // one per link, fetch order preserved
    std::uint64_t failed = 0;            // links that yielded a placeholder
};

// Captures per-item page links from the index document and fetches each;
// a failed fetch becomes an empty placeholder plus a warning, never an abort.
FollowResult follow_links(const std::string& document, const ExtractionStep& step,
                          DocumentFetcher& fetcher);

struct HarvestResult {
    std::vector<RawRepositoryEntry> entries;
    std::uint64_t all_items = 0;   // matched items (or followed links)
    std::uint64_t link_failures = 0;
};

// Runs one catalog's manifest end to end. One-step manifests count every
// pattern match as an item; matches whose capture is empty carry no
// endpoint (they count toward all_items but contribute no entry). Two-step
// manifests count followed links. Throws HarvestError when the root
// document cannot be fetched.
HarvestResult harvest_catalog(const SourceManifest& manifest, DocumentFetcher& fetcher);

}  // namespace omh
