#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omh/model.hpp"

namespace omh {

struct StoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Run directory layout (all text UTF-8, LF):
//   <run-id>/
//     run-meta.json            id, mode, times, config digest, catalog order
//     manifest.json            verbatim copy of the source manifest
//     snapshots/<catalog>.jsonl  one meta line, then one {"url": ...} per entry
//     probes.jsonl             one probe record per line (added by probing)
//     probe-meta.json          probe configuration (added by probing)
//     reports/*.csv|*.json     added by analysis
// Files are written once and never rewritten; later stages only add files.

struct RunMeta {
    std::string run_id;
    std::string mode;  // "fixture" | "live"
    std::int64_t started_at = 0;
    std::int64_t finished_at = 0;
    std::string config_digest;
    std::vector<std::string> catalog_order;  // fixes snapshot/bit order
    std::vector<std::string> notes;

    bool operator==(const RunMeta&) const = default;
};

struct RunArtifacts {
    RunMeta meta;
    std::string manifest_text;
    std::vector<CatalogSnapshot> snapshots;
    std::optional<std::vector<ProbeRecord>> probes;
};

struct LoadedRun {
    RunArtifacts run;
    std::vector<std::string> warnings;  // unknown files, skipped lines (lenient)
};

// Creates root/<run-id>/ and persists the harvest artifacts. The id is the
// UTC start time plus a short random suffix. A failure removes the partial
// directory and throws StoreError.
std::string save_run(const RunArtifacts& run, const std::string& root);

// Inverse of save_run for every value field. Strict mode throws StoreError
// naming file and line on any corrupt record; lenient mode skips the bad
// line with a warning.
LoadedRun load_run(const std::string& run_dir, bool lenient = false);

bool run_has_probes(const std::string& run_dir);
bool run_has_reports(const std::string& run_dir);

// Probe stage: writes probes.jsonl + probe-meta.json. Refuses (StoreError)
// when probe files already exist.
void append_probes(const std::string& run_dir, const std::vector<ProbeRecord>& records,
                   const std::string& probe_meta_json);

// Analysis stage: writes the named report files under reports/. Refuses
// (StoreError) when reports/ already exists.
void write_reports(const std::string& run_dir, const std::map<std::string, std::string>& files);

// One JSON object per record; shared with tests that build fault fixtures.
std::string probe_record_to_json(const ProbeRecord& record);
ProbeRecord probe_record_from_json(const std::string& line);

}  // namespace omh
