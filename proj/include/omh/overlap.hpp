#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "omh/model.hpp"

namespace omh {

// Union of entries_strong across snapshots, each key carrying the bitmask
// of the catalogs listing it. With reachable_only, keys are kept only when
// some probed variant of them answered a valid Identify; every snapshot
// entry must then be covered by a probe record.
MembershipMap build_membership(const std::vector<CatalogSnapshot>& snapshots,
                               bool reachable_only, const std::vector<ProbeRecord>& probes);

// Count per distinct nonzero mask. Absent regions are only materialized at
// serialization time.
std::map<Mask, std::uint64_t> venn_regions(const MembershipMap& map);

struct PairwiseResult {
    std::vector<std::vector<std::uint64_t>> matrix;  // symmetric, zero diagonal
    std::vector<std::uint64_t> per_catalog_total;
};

PairwiseResult pairwise_matrix(const MembershipMap& map);

// R[i][j] = pairwise[i][j] / totals[i], rounded half away from zero to two
// decimals; rows with a zero total stay all zero.
std::vector<std::vector<double>> ratio_matrix(const std::vector<std::vector<std::uint64_t>>& pairwise,
                                              const std::vector<std::uint64_t>& totals);

struct SpecificityResult {
    double fraction = 0.0;
    std::uint64_t count = 0;  // keys in exactly one catalog
};

// Throws ConfigError on an empty map (the fraction is undefined).
SpecificityResult specificity(const MembershipMap& map);

// Drops the catalog's bit everywhere, removes keys that lose their last
// catalog, compacts the order.
MembershipMap exclude_catalog(const MembershipMap& map, const std::string& excluded_id);

struct AllCommonResult {
    std::uint64_t count = 0;
    std::vector<std::string> keys;  // sorted ascending
};

AllCommonResult all_common(const MembershipMap& map);

// Bundles every statistic into one report (an empty map yields zeros).
OverlapReport make_overlap_report(const MembershipMap& map);

// Half away from zero, two decimals.
double round2(double v);

}  // namespace omh
