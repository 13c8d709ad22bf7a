#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "omh/clock.hpp"
#include "omh/normalize.hpp"
#include "omh/overlap.hpp"
#include "omh/probe.hpp"
#include "omh/report.hpp"
#include "omh/source.hpp"
#include "omh/store.hpp"
#include "omh/transport.hpp"
#include "omh/util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Exit codes are part of the CLI contract.
constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kPartialHarvest = 2;
constexpr int kImmutableRefusal = 3;

// Fixture runs pin the clock so replays are reproducible.
constexpr std::int64_t kFixtureEpochSeconds = 1483228800;  // 2017-01-01T00:00:00Z

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct HarvestArgs {
    std::string manifest_path;
    std::string out_dir;
    std::string fixtures_dir = ".";
    std::vector<std::string> catalogs;
    bool live = false;
};

int cmd_harvest(const HarvestArgs& args) {
    std::vector<omh::SourceManifest> manifests;
    try {
        manifests = omh::load_manifest(args.manifest_path);
    } catch (const omh::ManifestError& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return kUsageError;
    }

    if (!args.catalogs.empty()) {
        std::vector<omh::SourceManifest> selected;
        for (const auto& want : args.catalogs) {
            auto it = std::find_if(manifests.begin(), manifests.end(),
                                   [&](const auto& m) { return m.catalog.id == want; });
            if (it == manifests.end()) {
                std::cerr << "unknown catalog \"" << want << "\" (not in manifest)\n";
                return kUsageError;
            }
            selected.push_back(*it);
        }
        manifests = std::move(selected);
    }

    omh::SystemClock system_clock;
    std::int64_t now = args.live ? system_clock.now_seconds() : kFixtureEpochSeconds;

    omh::HttplibTransport live_transport;
    omh::FetchOptions fetch_options;
    std::unique_ptr<omh::DocumentFetcher> fetcher;
    if (args.live)
        fetcher = std::make_unique<omh::LiveFetcher>(live_transport, system_clock, fetch_options,
                                                     args.fixtures_dir);
    else
        fetcher = std::make_unique<omh::FileFetcher>(args.fixtures_dir);

    omh::RunArtifacts run;
    run.meta.mode = args.live ? "live" : "fixture";
    run.meta.started_at = now;
    run.meta.notes = {
        "normalization: host lowercased beyond scheme/www/slash removal (extension)"};
    run.manifest_text = read_text_file(args.manifest_path);

    std::vector<std::string> failed;
    for (const auto& manifest : manifests) {
        try {
            auto harvest = omh::harvest_catalog(manifest, *fetcher);
            std::vector<std::string> simple;
            simple.reserve(harvest.entries.size());
            for (const auto& entry : harvest.entries) {
                auto probe_url = omh::simple_normalize(entry.raw_url);
                if (!probe_url) {
                    omh::log_warn("catalog " + manifest.catalog.id +
                                  ": rejected empty-after-normalization entry \"" +
                                  entry.raw_url + "\"");
                    continue;
                }
                simple.push_back(std::move(*probe_url));
            }
            auto [unique, removed] = omh::dedupe(simple);
            auto snap = omh::make_snapshot(manifest.catalog, now, harvest.all_items,
                                           harvest.entries.size(), std::move(unique));
            std::cout << manifest.catalog.id << ": all_items " << snap.all_items << ", only_oai "
                      << snap.only_oai << ", unique " << snap.entries_simple.size()
                      << " (dropped " << removed << " duplicates)\n";
            run.meta.catalog_order.push_back(manifest.catalog.id);
            run.snapshots.push_back(std::move(snap));
        } catch (const omh::HarvestError& e) {
            omh::log_error(e.what());
            failed.push_back(manifest.catalog.id);
        }
    }
    run.meta.finished_at = args.live ? system_clock.now_seconds() : kFixtureEpochSeconds;
    run.meta.config_digest = omh::to_hex(omh::fnv1a64(run.manifest_text));

    std::string run_dir;
    try {
        run_dir = omh::save_run(run, args.out_dir);
    } catch (const omh::StoreError& e) {
        std::cerr << "store error: " << e.what() << "\n";
        return kUsageError;
    }
    if (!failed.empty()) {
        std::cout << "failed catalogs:";
        for (const auto& id : failed) std::cout << " " << id;
        std::cout << "\n";
    }
    std::cout << run_dir << "\n";
    return failed.empty() ? kOk : kPartialHarvest;
}

struct ProbeArgs {
    std::string run_dir;
    std::string responses_path;
    omh::ProbeConfig config;
    bool live = false;
};

int cmd_probe(const ProbeArgs& args) {
    if (omh::run_has_probes(args.run_dir)) {
        std::cerr << "run already probed; runs are immutable (start a new run)\n";
        return kImmutableRefusal;
    }
    omh::LoadedRun loaded;
    try {
        loaded = omh::load_run(args.run_dir);
    } catch (const omh::StoreError& e) {
        std::cerr << "cannot load run: " << e.what() << "\n";
        return kUsageError;
    }

    // each unique endpoint is probed once, shared across catalogs
    std::vector<std::string> all_urls;
    for (const auto& snap : loaded.run.snapshots)
        all_urls.insert(all_urls.end(), snap.entries_simple.begin(),
                        snap.entries_simple.end());
    auto [urls, shared] = omh::dedupe(all_urls);

    std::unique_ptr<omh::Transport> transport;
    std::unique_ptr<omh::Clock> clock;
    if (args.live) {
        transport = std::make_unique<omh::HttplibTransport>();
        clock = std::make_unique<omh::SystemClock>();
    } else {
        if (args.responses_path.empty()) {
            std::cerr << "fixture mode needs --responses FILE (or pass --live)\n";
            return kUsageError;
        }
        try {
            transport = std::make_unique<omh::ScriptedTransport>(
                omh::ScriptedTransport::from_file(args.responses_path));
        } catch (const std::exception& e) {
            std::cerr << "cannot load response script: " << e.what() << "\n";
            return kUsageError;
        }
        clock = std::make_unique<omh::VirtualClock>(kFixtureEpochSeconds * 1000);
    }

    std::vector<omh::ProbeRecord> records;
    try {
        records = omh::probe_all(urls, args.config, *clock, *transport);
    } catch (const omh::ConfigError& e) {
        std::cerr << "probe configuration error: " << e.what() << "\n";
        return kUsageError;
    }

    ordered_json meta;
    meta["mode"] = args.live ? "live" : "fixture";
    meta["max_in_flight"] = args.config.max_in_flight;
    meta["per_host_delay_ms"] = args.config.per_host_delay_ms;
    meta["timeout_seconds"] = args.config.timeout_seconds;
    meta["retries"] = args.config.retries;
    meta["retry_spacing_ms"] = args.config.retry_spacing_ms;
    meta["user_agent"] = args.config.user_agent;
    meta["follow_redirects"] = args.config.follow_redirects;
    meta["allow_tls"] = args.config.allow_tls;
    meta["urls_probed"] = urls.size();
    meta["urls_shared_across_catalogs"] = shared;

    try {
        omh::append_probes(args.run_dir, records, meta.dump(2) + "\n");
    } catch (const omh::StoreError& e) {
        std::cerr << "store error: " << e.what() << "\n";
        return kUsageError;
    }

    auto summary = omh::summarize_outcomes(records);
    std::cout << "probed " << records.size() << " endpoints: " << summary.success_count
              << " reachable, " << summary.error_count << " errors (success "
              << omh::format_fixed(summary.success_fraction * 100.0, 1) << "%)\n";
    std::cout << args.run_dir << "\n";
    return kOk;
}

struct AnalyzeArgs {
    std::string run_dir;
    std::vector<std::string> exclude;
    bool include_unreachable = false;
};

int cmd_analyze(const AnalyzeArgs& args) {
    if (omh::run_has_reports(args.run_dir)) {
        std::cerr << "run already analyzed; runs are immutable (start a new run)\n";
        return kImmutableRefusal;
    }
    omh::LoadedRun loaded;
    try {
        loaded = omh::load_run(args.run_dir);
    } catch (const omh::StoreError& e) {
        std::cerr << "cannot load run: " << e.what() << "\n";
        return kUsageError;
    }
    const auto& run = loaded.run;
    if (run.snapshots.empty()) {
        std::cerr << "run has no snapshots to analyze\n";
        return kUsageError;
    }
    if (!run.probes && !args.include_unreachable) {
        std::cerr << "run has no probe records; overlap analytics compare operational "
                     "endpoints, so either probe the run first or pass "
                     "--include-unreachable to compare raw listings\n";
        return kUsageError;
    }

    std::map<std::string, std::string> files;
    files["counts.csv"] = omh::emit_count_table(run.snapshots);

    std::vector<omh::ProbeRecord> probes = run.probes.value_or(std::vector<omh::ProbeRecord>{});
    if (run.probes) {
        std::vector<omh::CatalogProbeStats> stats;
        for (const auto& snap : run.snapshots)
            stats.push_back(omh::derive_catalog_probe_stats(snap, probes));
        files["probes.csv"] = omh::emit_probe_table(stats);
        files["errors.csv"] = omh::emit_error_table(omh::summarize_outcomes(probes));
    }

    omh::MembershipMap membership;
    try {
        membership = omh::build_membership(run.snapshots, !args.include_unreachable, probes);
    } catch (const omh::ConfigError& e) {
        std::cerr << "cannot build membership: " << e.what() << "\n";
        return kUsageError;
    }
    auto report = omh::make_overlap_report(membership);
    auto doc = omh::emit_overlap_report(report);
    files["overlap.json"] = doc.json_text;
    files["regions.csv"] = doc.regions_csv;

    for (const auto& id : args.exclude) {
        omh::MembershipMap reduced;
        try {
            reduced = omh::exclude_catalog(membership, id);
        } catch (const omh::ConfigError& e) {
            std::cerr << "cannot exclude catalog: " << e.what() << "\n";
            return kUsageError;
        }
        auto variant = omh::emit_overlap_report(omh::make_overlap_report(reduced));
        files["overlap-excl-" + id + ".json"] = variant.json_text;
        files["regions-excl-" + id + ".csv"] = variant.regions_csv;
    }

    try {
        omh::write_reports(args.run_dir, files);
    } catch (const omh::StoreError& e) {
        std::cerr << "store error: " << e.what() << "\n";
        return kUsageError;
    }

    std::cout << "distinct endpoints: " << report.total_distinct << "\n";
    if (report.total_distinct > 0) {
        std::cout << "specific to one catalog: " << report.specificity_count << " ("
                  << omh::format_fixed(report.specificity_fraction * 100.0, 1) << "%)\n";
        std::cout << "common to all: " << report.all_common_count << "\n";
    }
    std::cout << args.run_dir << "\n";
    return kOk;
}

struct DiffArgs {
    std::string earlier;
    std::string later;
    std::string out_path = "diff.csv";
};

omh::RunKeySummary key_summary(const omh::RunArtifacts& run) {
    omh::RunKeySummary summary;
    for (const auto& snap : run.snapshots) {
        omh::RunCatalogKeys keys;
        keys.catalog_id = snap.catalog.id;
        for (const auto& k : snap.entries_strong) keys.keys.push_back(k.key);
        summary.catalogs.push_back(std::move(keys));
    }
    return summary;
}

int cmd_diff(const DiffArgs& args) {
    omh::LoadedRun earlier, later;
    try {
        earlier = omh::load_run(args.earlier);
        later = omh::load_run(args.later);
    } catch (const omh::StoreError& e) {
        std::cerr << "cannot load run: " << e.what() << "\n";
        return kUsageError;
    }
    std::vector<omh::DiffRow> rows;
    try {
        rows = omh::diff_runs(key_summary(earlier.run), key_summary(later.run));
    } catch (const omh::DiffError& e) {
        std::cerr << "diff error: " << e.what() << "\n";
        return kUsageError;
    }
    auto table = omh::emit_diff_table(rows);
    std::cout << table;
    std::ofstream out(args.out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "cannot write " << args.out_path << "\n";
        return kUsageError;
    }
    out << table;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meta-catalog harvesting, probing and overlap analysis"};
    app.require_subcommand(1);

    HarvestArgs harvest;
    auto* h = app.add_subcommand("harvest", "collect repository listings into a new run");
    h->add_option("--manifest", harvest.manifest_path, "source manifest (JSON)")->required();
    h->add_option("--out", harvest.out_dir, "directory to create the run under")->required();
    h->add_option("--fixtures", harvest.fixtures_dir, "directory file: references resolve against");
    h->add_option("--catalog", harvest.catalogs, "restrict to these catalog ids");
    h->add_flag("--live", harvest.live, "fetch over the network instead of fixtures");

    ProbeArgs probe;
    std::int64_t retry_spacing_s = probe.config.retry_spacing_ms / 1000;
    auto* p = app.add_subcommand("probe", "check every harvested endpoint with ?verb=Identify");
    p->add_option("--run", probe.run_dir, "run directory from harvest")->required();
    p->add_option("--responses", probe.responses_path, "scripted responses (fixture mode)");
    p->add_option("--concurrency", probe.config.max_in_flight, "max in-flight requests");
    p->add_option("--timeout", probe.config.timeout_seconds, "per-request timeout, seconds");
    p->add_option("--retries", probe.config.retries, "additional attempts on 5xx/transport errors");
    p->add_option("--retry-spacing", retry_spacing_s, "seconds between attempt waves");
    p->add_option("--per-host-delay", probe.config.per_host_delay_ms,
                  "min gap between requests to one host, ms");
    p->add_option("--user-agent", probe.config.user_agent, "User-Agent header");
    p->add_flag("--live", probe.live, "probe over the network instead of a script");

    AnalyzeArgs analyze;
    auto* a = app.add_subcommand("analyze", "compute overlap analytics and write reports");
    a->add_option("--run", analyze.run_dir, "run directory with snapshots and probes")->required();
    a->add_option("--exclude-catalog", analyze.exclude,
                  "also emit a report variant without this catalog");
    a->add_flag("--include-unreachable", analyze.include_unreachable,
                "compare raw listings instead of operational endpoints");

    DiffArgs diff;
    auto* d = app.add_subcommand("diff", "compare two runs catalog by catalog");
    d->add_option("--earlier", diff.earlier, "earlier run directory")->required();
    d->add_option("--later", diff.later, "later run directory")->required();
    d->add_option("--out", diff.out_path, "growth table destination");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    // flag beats environment beats default
    if (const char* ua = std::getenv("OMH_USER_AGENT"); ua && p->count("--user-agent") == 0)
        probe.config.user_agent = ua;
    if (p->count("--retry-spacing") > 0) probe.config.retry_spacing_ms = retry_spacing_s * 1000;

    try {
        if (app.got_subcommand(h)) return cmd_harvest(harvest);
        if (app.got_subcommand(p)) return cmd_probe(probe);
        if (app.got_subcommand(a)) return cmd_analyze(analyze);
        if (app.got_subcommand(d)) return cmd_diff(diff);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}
