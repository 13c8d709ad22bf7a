#include "omh/overlap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace omh {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

MembershipMap build_membership(const std::vector<CatalogSnapshot>& snapshots,
                               bool reachable_only, const std::vector<ProbeRecord>& probes) {
    MembershipMap map;
    for (const auto& s : snapshots) map.catalog_order.push_back(s.catalog);
    validate_catalog_order(map.catalog_order);

    std::unordered_set<std::string> reachable;
    std::unordered_set<std::string> probed;
    if (reachable_only) {
        for (const auto& p : probes) {
            probed.insert(p.probe_url);
            if (p.outcome == ProbeOutcome::Reachable) reachable.insert(p.normalized.key);
        }
        for (const auto& s : snapshots)
            for (const auto& url : s.entries_simple)
                if (!probed.count(url))
                    throw ConfigError("catalog " + s.catalog.id + ": entry \"" + url +
                                      "\" has no probe record (probe the run first)");
    }

    for (size_t i = 0; i < snapshots.size(); ++i) {
        Mask bit = Mask{1} << i;
        for (const auto& key : snapshots[i].entries_strong) {
            if (reachable_only && !reachable.count(key.key)) continue;
            map.entries[key.key] |= bit;
        }
    }
    return map;
}

std::map<Mask, std::uint64_t> venn_regions(const MembershipMap& map) {
    std::map<Mask, std::uint64_t> regions;
    for (const auto& [key, mask] : map.entries) ++regions[mask];
    return regions;
}

PairwiseResult pairwise_matrix(const MembershipMap& map) {
    size_t k = map.catalog_order.size();
    PairwiseResult out;
    out.matrix.assign(k, std::vector<std::uint64_t>(k, 0));
    out.per_catalog_total.assign(k, 0);
    for (const auto& [key, mask] : map.entries) {
        for (size_t i = 0; i < k; ++i) {
            if (!(mask & (Mask{1} << i))) continue;
            ++out.per_catalog_total[i];
            for (size_t j = i + 1; j < k; ++j) {
                if (mask & (Mask{1} << j)) {
                    ++out.matrix[i][j];
                    ++out.matrix[j][i];
                }
            }
        }
    }
    return out;
}

std::vector<std::vector<double>> ratio_matrix(
    const std::vector<std::vector<std::uint64_t>>& pairwise,
    const std::vector<std::uint64_t>& totals) {
    size_t k = totals.size();
    std::vector<std::vector<double>> ratio(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
        if (totals[i] == 0) continue;
        for (size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            ratio[i][j] = round2(static_cast<double>(pairwise[i][j]) /
                                 static_cast<double>(totals[i]));
        }
    }
    return ratio;
}

SpecificityResult specificity(const MembershipMap& map) {
    if (map.entries.empty())
        throw ConfigError("specificity is undefined on an empty membership map");
    SpecificityResult out;
    for (const auto& [key, mask] : map.entries)
        if (std::popcount(mask) == 1) ++out.count;
    out.fraction = static_cast<double>(out.count) / static_cast<double>(map.entries.size());
    return out;
}

MembershipMap exclude_catalog(const MembershipMap& map, const std::string& excluded_id) {
    size_t idx = map.catalog_order.size();
    for (size_t i = 0; i < map.catalog_order.size(); ++i)
        if (map.catalog_order[i].id == excluded_id) idx = i;
    if (idx == map.catalog_order.size())
        throw ConfigError("unknown catalog id \"" + excluded_id + "\" (not in catalog order)");

    MembershipMap out;
    for (size_t i = 0; i < map.catalog_order.size(); ++i)
        if (i != idx) out.catalog_order.push_back(map.catalog_order[i]);

    Mask low = (Mask{1} << idx) - 1;
    for (const auto& [key, mask] : map.entries) {
        Mask compacted = (mask & low) | ((mask >> (idx + 1)) << idx);
        if (compacted) out.entries[key] = compacted;
    }
    return out;
}

AllCommonResult all_common(const MembershipMap& map) {
    AllCommonResult out;
    size_t k = map.catalog_order.size();
    if (k == 0) return out;
    Mask full = k >= 32 ? ~Mask{0} : (Mask{1} << k) - 1;
    for (const auto& [key, mask] : map.entries) {
        if (mask == full) {
            ++out.count;
            out.keys.push_back(key);  // map iteration is already sorted
        }
    }
    return out;
}

OverlapReport make_overlap_report(const MembershipMap& map) {
    OverlapReport report;
    report.catalog_order = map.catalog_order;
    report.total_distinct = map.total_distinct();
    report.region_counts = venn_regions(map);
    auto pw = pairwise_matrix(map);
    report.pairwise = std::move(pw.matrix);
    report.per_catalog_total = std::move(pw.per_catalog_total);
    report.ratio = ratio_matrix(report.pairwise, report.per_catalog_total);
    if (!map.entries.empty()) {
        auto spec = specificity(map);
        report.specificity_count = spec.count;
        report.specificity_fraction = spec.fraction;
    }
    auto common = all_common(map);
    report.all_common_count = common.count;
    report.all_common_keys = std::move(common.keys);
    return report;
}

}  // namespace omh
