#include "omh/report.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "omh/normalize.hpp"
#include "omh/overlap.hpp"
#include "omh/util.hpp"

namespace omh {

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string emit_count_table(const std::vector<CatalogSnapshot>& snapshots) {
    if (snapshots.empty()) throw ConfigError("count table needs at least one snapshot");
    std::vector<std::string> header{"metric"};
    for (const auto& s : snapshots) header.push_back(s.catalog.id);
    std::string out = csv_row(header);

    auto row = [&](const std::string& name, auto value_of) {
        std::vector<std::string> fields{name};
        for (const auto& s : snapshots) fields.push_back(std::to_string(value_of(s)));
        out += csv_row(fields);
    };
    row("all_items", [](const CatalogSnapshot& s) { return s.all_items; });
    row("only_oai", [](const CatalogSnapshot& s) { return s.only_oai; });
    row("unique", [](const CatalogSnapshot& s) { return s.entries_simple.size(); });
    return out;
}

CatalogProbeStats derive_catalog_probe_stats(const CatalogSnapshot& snapshot,
                                             const std::vector<ProbeRecord>& probes) {
    std::unordered_map<std::string, const ProbeRecord*> by_url;
    for (const auto& p : probes) by_url.emplace(p.probe_url, &p);

    CatalogProbeStats stats;
    stats.catalog_id = snapshot.catalog.id;
    stats.nb_total = snapshot.entries_simple.size();
    std::unordered_set<std::string> unique_keys;
    for (const auto& url : snapshot.entries_simple) {
        auto it = by_url.find(url);
        if (it == by_url.end() || it->second->outcome != ProbeOutcome::Reachable) continue;
        ++stats.nb_success;
        if (!it->second->normalized.key.empty()) unique_keys.insert(it->second->normalized.key);
    }
    stats.nb_unique = unique_keys.size();
    return stats;
}

std::string emit_probe_table(const std::vector<CatalogProbeStats>& stats) {
    if (stats.empty()) throw ConfigError("probe table needs at least one catalog");
    std::vector<std::string> header{"metric"};
    for (const auto& s : stats) header.push_back(s.catalog_id);
    std::string out = csv_row(header);

    auto count_row = [&](const std::string& name, auto value_of) {
        std::vector<std::string> fields{name};
        for (const auto& s : stats) fields.push_back(std::to_string(value_of(s)));
        out += csv_row(fields);
    };
    count_row("nb_total", [](const CatalogProbeStats& s) { return s.nb_total; });
    count_row("nb_success", [](const CatalogProbeStats& s) { return s.nb_success; });
    count_row("nb_unique", [](const CatalogProbeStats& s) { return s.nb_unique; });

    auto pct_row = [&](const std::string& name, auto numerator) {
        std::vector<std::string> fields{name};
        for (const auto& s : stats) {
            double pct = s.nb_total == 0 ? 0.0
                                         : 100.0 * static_cast<double>(numerator(s)) /
                                               static_cast<double>(s.nb_total);
            fields.push_back(format_fixed(pct, 1));
        }
        out += csv_row(fields);
    };
    pct_row("pct_success", [](const CatalogProbeStats& s) { return s.nb_success; });
    pct_row("pct_error", [](const CatalogProbeStats& s) { return s.nb_total - s.nb_success; });
    return out;
}

std::string emit_error_table(const OutcomeSummary& summary) {
    std::string out = csv_row({"status", "fraction"});
    if (summary.error_count == 0) {
        out += csv_row({"no_errors", ""});
        return out;
    }
    // numeric statuses first (map order is lexicographic, which matches
    // numeric order for 3-digit codes), then named buckets
    for (const auto& [bucket, fraction] : summary.error_fractions) {
        if (bucket == "transport" || bucket == "wrong_success_200") continue;
        out += csv_row({bucket, format_fixed(round2(fraction), 2)});
    }
    auto named = [&](const char* bucket) {
        auto it = summary.error_fractions.find(bucket);
        if (it != summary.error_fractions.end())
            out += csv_row({bucket, format_fixed(round2(it->second), 2)});
    };
    named("wrong_success_200");
    named("transport");
    return out;
}

OverlapDocument emit_overlap_report(const OverlapReport& report) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["catalog_order"] = json::array();
    for (const auto& c : report.catalog_order)
        doc["catalog_order"].push_back({{"id", c.id}, {"display_name", c.display_name}});
    doc["subset_separator"] = "&";
    doc["total_distinct"] = report.total_distinct;

    size_t k = report.catalog_order.size();
    Mask full = k == 0 ? 0 : (k >= 32 ? ~Mask{0} : (Mask{1} << k) - 1);
    json regions = json::array();
    std::string regions_csv = csv_row({"mask", "catalogs", "count"});
    for (Mask mask = 1; mask <= full && full != 0; ++mask) {
        auto it = report.region_counts.find(mask);
        std::uint64_t count = it == report.region_counts.end() ? 0 : it->second;
        std::string name = subset_name(mask, report.catalog_order);
        regions.push_back({{"mask", mask}, {"catalogs", name}, {"count", count}});
        regions_csv += csv_row({std::to_string(mask), name, std::to_string(count)});
    }
    doc["regions"] = std::move(regions);
    doc["pairwise"] = report.pairwise;
    doc["per_catalog_total"] = report.per_catalog_total;
    doc["ratio"] = report.ratio;
    doc["specificity"] = {{"count", report.specificity_count},
                          {"fraction", report.specificity_fraction}};
    doc["all_common"] = {{"count", report.all_common_count}, {"keys", report.all_common_keys}};

    OverlapDocument out;
    out.json_text = doc.dump(2) + "\n";
    out.regions_csv = std::move(regions_csv);
    return out;
}

OverlapReport parse_overlap_document(const std::string& json_text) {
    auto doc = nlohmann::json::parse(json_text);
    OverlapReport report;
    for (const auto& c : doc.at("catalog_order"))
        report.catalog_order.push_back(
            CatalogId{c.at("id").get<std::string>(), c.at("display_name").get<std::string>()});
    report.total_distinct = doc.at("total_distinct").get<std::uint64_t>();
    for (const auto& r : doc.at("regions")) {
        auto count = r.at("count").get<std::uint64_t>();
        if (count > 0) report.region_counts[r.at("mask").get<Mask>()] = count;
    }
    report.pairwise = doc.at("pairwise").get<std::vector<std::vector<std::uint64_t>>>();
    report.per_catalog_total = doc.at("per_catalog_total").get<std::vector<std::uint64_t>>();
    report.ratio = doc.at("ratio").get<std::vector<std::vector<double>>>();
    report.specificity_count = doc.at("specificity").at("count").get<std::uint64_t>();
    report.specificity_fraction = doc.at("specificity").at("fraction").get<double>();
    report.all_common_count = doc.at("all_common").at("count").get<std::uint64_t>();
    report.all_common_keys = doc.at("all_common").at("keys").get<std::vector<std::string>>();
    return report;
}

std::vector<DiffRow> diff_runs(const RunKeySummary& earlier, const RunKeySummary& later) {
    std::unordered_map<std::string, const RunCatalogKeys*> later_by_id;
    for (const auto& c : later.catalogs) later_by_id.emplace(c.catalog_id, &c);

    std::vector<DiffRow> rows;
    for (const auto& before : earlier.catalogs) {
        auto it = later_by_id.find(before.catalog_id);
        if (it == later_by_id.end()) continue;
        const auto& after = *it->second;

        std::unordered_set<std::string> before_keys(before.keys.begin(), before.keys.end());
        std::unordered_set<std::string> after_keys(after.keys.begin(), after.keys.end());
        DiffRow row;
        row.catalog_id = before.catalog_id;
        row.unique_delta = static_cast<std::int64_t>(after_keys.size()) -
                           static_cast<std::int64_t>(before_keys.size());
        for (const auto& k : after_keys)
            if (!before_keys.count(k)) ++row.appeared;
        for (const auto& k : before_keys)
            if (!after_keys.count(k)) ++row.disappeared;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DiffError("the two runs share no catalog id");
    return rows;
}

std::string emit_diff_table(const std::vector<DiffRow>& rows) {
    std::string out = csv_row({"catalog", "unique_delta", "appeared", "disappeared"});
    for (const auto& r : rows)
        out += csv_row({r.catalog_id, std::to_string(r.unique_delta), std::to_string(r.appeared),
                        std::to_string(r.disappeared)});
    return out;
}

}  // namespace omh
