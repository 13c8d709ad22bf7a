#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omh/model.hpp"
#include "omh/probe.hpp"

namespace omh {

struct DiffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// counts.csv: one column per catalog (manifest order), rows
// all_items / only_oai / unique. Byte-stable for identical input.
std::string emit_count_table(const std::vector<CatalogSnapshot>& snapshots);

struct CatalogProbeStats {
    std::string catalog_id;
    std::uint64_t nb_total = 0;    // probed endpoints listed by the catalog
    std::uint64_t nb_success = 0;  // of those, valid Identify answers
    std::uint64_t nb_unique = 0;   // distinct comparison keys among successes

    bool operator==(const CatalogProbeStats&) const = default;
};

// Joins shared probe outcomes back onto one catalog's entry list.
CatalogProbeStats derive_catalog_probe_stats(const CatalogSnapshot& snapshot,
                                             const std::vector<ProbeRecord>& probes);

// probes.csv: per-catalog columns, rows nb_total / nb_success / nb_unique /
// pct_success / pct_error (percentages with 1 decimal).
std::string emit_probe_table(const std::vector<CatalogProbeStats>& stats);

// errors.csv: status bucket -> fraction of all errors, 2 decimals; an
// explicit no_errors marker row when nothing failed.
std::string emit_error_table(const OutcomeSummary& summary);

struct OverlapDocument {
    std::string json_text;    // overlap.json
    std::string regions_csv;  // regions.csv, full 2^k - 1 lattice
};

OverlapDocument emit_overlap_report(const OverlapReport& report);

// Inverse of emit_overlap_report's JSON side; used to verify round-trips
// and by downstream consumers.
OverlapReport parse_overlap_document(const std::string& json_text);

struct RunCatalogKeys {
    std::string catalog_id;
    std::vector<std::string> keys;  // strong comparison keys, snapshot order

    bool operator==(const RunCatalogKeys&) const = default;
};

struct RunKeySummary {
    std::vector<RunCatalogKeys> catalogs;
};

struct DiffRow {
    std::string catalog_id;
    std::int64_t unique_delta = 0;
    std::uint64_t appeared = 0;
    std::uint64_t disappeared = 0;

    bool operator==(const DiffRow&) const = default;
};

// Per catalog shared by both runs (earlier's order): key-count delta plus
// appeared/disappeared key counts. Throws DiffError when the runs share no
// catalog.
std::vector<DiffRow> diff_runs(const RunKeySummary& earlier, const RunKeySummary& later);

std::string emit_diff_table(const std::vector<DiffRow>& rows);

// Fixed-decimal rendering used across every table ("96.5", "0.58").
std::string format_fixed(double value, int decimals);

}  // namespace omh
