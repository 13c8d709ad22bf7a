#include "omh/store.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "omh/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace omh {

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw StoreError("short write to " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string random_suffix() {
    std::random_device rd;
    std::uniform_int_distribution<int> hex(0, 15);
    std::string s;
    for (int i = 0; i < 6; ++i) s += "0123456789abcdef"[hex(rd)];
    return s;
}

std::string compact_utc(std::int64_t epoch_seconds) {
    std::string iso = format_utc(epoch_seconds);  // 2017-01-01T00:00:00Z
    std::string out;
    for (char c : iso)
        if (c != '-' && c != ':') out += c;
    return out;
}

template <typename T>
void set_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

}  // namespace

std::string probe_record_to_json(const ProbeRecord& record) {
    ordered_json j;
    j["probe_url"] = record.probe_url;
    j["key"] = record.normalized.key;
    j["outcome"] = outcome_name(record.outcome);
    set_optional(j, "http_status", record.http_status);
    set_optional(j, "repository_name", record.repository_name);
    set_optional(j, "protocol_version", record.protocol_version);
    set_optional(j, "earliest_datestamp", record.earliest_datestamp);
    j["attempts"] = record.attempts;
    j["completed_at"] = format_utc(record.completed_at);
    return j.dump();
}

ProbeRecord probe_record_from_json(const std::string& line) {
    auto j = json::parse(line);
    ProbeRecord r;
    r.probe_url = j.at("probe_url").get<std::string>();
    r.normalized.key = j.at("key").get<std::string>();
    auto outcome = outcome_from_name(j.at("outcome").get<std::string>());
    if (!outcome) throw StoreError("unknown outcome \"" + j.at("outcome").get<std::string>() + "\"");
    r.outcome = *outcome;
    if (j.contains("http_status")) r.http_status = j.at("http_status").get<int>();
    if (j.contains("repository_name"))
        r.repository_name = j.at("repository_name").get<std::string>();
    if (j.contains("protocol_version"))
        r.protocol_version = j.at("protocol_version").get<std::string>();
    if (j.contains("earliest_datestamp"))
        r.earliest_datestamp = j.at("earliest_datestamp").get<std::string>();
    r.attempts = j.at("attempts").get<int>();
    auto at = parse_utc(j.at("completed_at").get<std::string>());
    if (!at) throw StoreError("bad completed_at timestamp");
    r.completed_at = *at;

    if ((r.outcome == ProbeOutcome::TransportError) != !r.http_status)
        throw StoreError("http_status must be absent exactly for transport errors");
    return r;
}

namespace {

std::string snapshot_to_jsonl(const CatalogSnapshot& snap) {
    ordered_json meta;
    meta["type"] = "snapshot";
    meta["catalog"] = snap.catalog.id;
    meta["display_name"] = snap.catalog.display_name;
    meta["harvested_at"] = format_utc(snap.harvested_at);
    meta["all_items"] = snap.all_items;
    meta["only_oai"] = snap.only_oai;
    std::string out = meta.dump() + "\n";
    for (const auto& url : snap.entries_simple) {
        ordered_json entry;
        entry["url"] = url;
        out += entry.dump() + "\n";
    }
    return out;
}

CatalogSnapshot snapshot_from_jsonl(const fs::path& path, bool lenient,
                                    std::vector<std::string>& warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot read " + path.string());
    std::string line;
    size_t lineno = 0;

    auto fail = [&](const std::string& why) -> StoreError {
        return StoreError(path.string() + ":" + std::to_string(lineno) + ": " + why);
    };

    CatalogId catalog;
    std::int64_t harvested_at = 0;
    std::uint64_t all_items = 0, only_oai = 0;
    std::vector<std::string> entries;
    bool have_meta = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            if (lenient) {
                warnings.push_back(path.string() + ":" + std::to_string(lineno) +
                                   ": skipped unparseable line");
                continue;
            }
            throw fail(std::string("invalid JSON: ") + e.what());
        }
        try {
            if (!have_meta) {
                if (j.value("type", "") != "snapshot") throw StoreError("first record must be the snapshot meta");
                catalog.id = j.at("catalog").get<std::string>();
                catalog.display_name = j.at("display_name").get<std::string>();
                auto at = parse_utc(j.at("harvested_at").get<std::string>());
                if (!at) throw StoreError("bad harvested_at timestamp");
                harvested_at = *at;
                all_items = j.at("all_items").get<std::uint64_t>();
                only_oai = j.at("only_oai").get<std::uint64_t>();
                have_meta = true;
            } else {
                entries.push_back(j.at("url").get<std::string>());
            }
        } catch (const StoreError&) {
            throw;
        } catch (const std::exception& e) {
            if (lenient && have_meta) {
                warnings.push_back(path.string() + ":" + std::to_string(lineno) +
                                   ": skipped bad record");
                continue;
            }
            throw fail(std::string("bad record: ") + e.what());
        }
    }
    if (!have_meta) throw StoreError(path.string() + ": no snapshot meta record");
    try {
        return make_snapshot(catalog, harvested_at, all_items, only_oai, std::move(entries));
    } catch (const ConfigError& e) {
        throw StoreError(path.string() + ": " + e.what());
    }
}

ordered_json run_meta_to_json(const RunMeta& meta) {
    ordered_json j;
    j["run_id"] = meta.run_id;
    j["mode"] = meta.mode;
    j["started_at"] = format_utc(meta.started_at);
    j["finished_at"] = format_utc(meta.finished_at);
    j["config_digest"] = meta.config_digest;
    j["catalog_order"] = meta.catalog_order;
    j["notes"] = meta.notes;
    return j;
}

RunMeta run_meta_from_json(const std::string& text, const fs::path& path) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw StoreError(path.string() + ": invalid JSON: " + e.what());
    }
    RunMeta meta;
    try {
        meta.run_id = j.at("run_id").get<std::string>();
        meta.mode = j.at("mode").get<std::string>();
        auto started = parse_utc(j.at("started_at").get<std::string>());
        auto finished = parse_utc(j.at("finished_at").get<std::string>());
        if (!started || !finished) throw StoreError("bad timestamp");
        meta.started_at = *started;
        meta.finished_at = *finished;
        meta.config_digest = j.at("config_digest").get<std::string>();
        meta.catalog_order = j.at("catalog_order").get<std::vector<std::string>>();
        meta.notes = j.value("notes", std::vector<std::string>{});
    } catch (const StoreError&) {
        throw;
    } catch (const std::exception& e) {
        throw StoreError(path.string() + ": " + e.what());
    }
    return meta;
}

}  // namespace

std::string save_run(const RunArtifacts& run, const std::string& root) {
    fs::path root_path(root);
    std::error_code ec;
    fs::create_directories(root_path, ec);
    if (ec || !fs::is_directory(root_path))
        throw StoreError("run root is not a writable directory: " + root);

    RunMeta meta = run.meta;
    if (meta.run_id.empty())
        meta.run_id = compact_utc(meta.started_at) + "-" + random_suffix();
    fs::path run_dir = root_path / meta.run_id;
    if (fs::exists(run_dir)) throw StoreError("run directory already exists: " + run_dir.string());

    try {
        if (!fs::create_directory(run_dir, ec) || ec)
            throw StoreError("cannot create run directory " + run_dir.string());
        write_file(run_dir / "run-meta.json", run_meta_to_json(meta).dump(2) + "\n");
        if (!run.manifest_text.empty())
            write_file(run_dir / "manifest.json", run.manifest_text);
        if (!run.snapshots.empty()) {
            fs::create_directory(run_dir / "snapshots");
            for (const auto& snap : run.snapshots)
                write_file(run_dir / "snapshots" / (snap.catalog.id + ".jsonl"),
                           snapshot_to_jsonl(snap));
        }
        if (run.probes) {
            std::string lines;
            for (const auto& r : *run.probes) lines += probe_record_to_json(r) + "\n";
            write_file(run_dir / "probes.jsonl", lines);
        }
    } catch (...) {
        fs::remove_all(run_dir, ec);  // leave nothing behind
        throw;
    }
    return run_dir.string();
}

LoadedRun load_run(const std::string& run_dir, bool lenient) {
    fs::path dir(run_dir);
    if (!fs::is_directory(dir)) throw StoreError("not a run directory: " + run_dir);

    LoadedRun out;
    out.run.meta = run_meta_from_json(read_file(dir / "run-meta.json"), dir / "run-meta.json");
    if (fs::exists(dir / "manifest.json"))
        out.run.manifest_text = read_file(dir / "manifest.json");

    fs::path snapdir = dir / "snapshots";
    std::map<std::string, fs::path> snapshot_files;
    if (fs::is_directory(snapdir)) {
        for (const auto& e : fs::directory_iterator(snapdir)) {
            if (e.path().extension() == ".jsonl")
                snapshot_files[e.path().stem().string()] = e.path();
            else
                out.warnings.push_back("ignoring unknown file " + e.path().string());
        }
    }
    for (const auto& id : out.run.meta.catalog_order) {
        auto it = snapshot_files.find(id);
        if (it == snapshot_files.end())
            throw StoreError("run lists catalog \"" + id + "\" but snapshots/" + id +
                             ".jsonl is missing");
        out.run.snapshots.push_back(snapshot_from_jsonl(it->second, lenient, out.warnings));
        snapshot_files.erase(it);
    }
    for (const auto& [id, path] : snapshot_files)
        out.warnings.push_back("ignoring snapshot not in catalog_order: " + path.string());

    fs::path probes_path = dir / "probes.jsonl";
    if (fs::exists(probes_path)) {
        std::ifstream in(probes_path, std::ios::binary);
        if (!in) throw StoreError("cannot read " + probes_path.string());
        std::vector<ProbeRecord> records;
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            try {
                records.push_back(probe_record_from_json(line));
            } catch (const std::exception& e) {
                if (lenient) {
                    out.warnings.push_back(probes_path.string() + ":" + std::to_string(lineno) +
                                           ": skipped bad record");
                    continue;
                }
                throw StoreError(probes_path.string() + ":" + std::to_string(lineno) + ": " +
                                 e.what());
            }
        }
        out.run.probes = std::move(records);
    }

    static const std::set<std::string> known{"run-meta.json", "manifest.json", "snapshots",
                                             "probes.jsonl", "probe-meta.json", "reports"};
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!known.count(e.path().filename().string()))
            out.warnings.push_back("ignoring unknown file " + e.path().string());
    }
    for (const auto& w : out.warnings) log_warn(w);
    return out;
}

bool run_has_probes(const std::string& run_dir) {
    return fs::exists(fs::path(run_dir) / "probes.jsonl");
}

bool run_has_reports(const std::string& run_dir) {
    return fs::exists(fs::path(run_dir) / "reports");
}

void append_probes(const std::string& run_dir, const std::vector<ProbeRecord>& records,
                   const std::string& probe_meta_json) {
    fs::path dir(run_dir);
    if (!fs::is_directory(dir)) throw StoreError("not a run directory: " + run_dir);
    if (run_has_probes(run_dir))
        throw StoreError("run already has probe records (runs are immutable): " + run_dir);
    std::string lines;
    for (const auto& r : records) lines += probe_record_to_json(r) + "\n";
    write_file(dir / "probes.jsonl", lines);
    write_file(dir / "probe-meta.json", probe_meta_json);
}

void write_reports(const std::string& run_dir, const std::map<std::string, std::string>& files) {
    fs::path dir(run_dir);
    if (!fs::is_directory(dir)) throw StoreError("not a run directory: " + run_dir);
    fs::path reports = dir / "reports";
    if (fs::exists(reports))
        throw StoreError("run already has reports (runs are immutable): " + run_dir);
    if (!fs::create_directory(reports))
        throw StoreError("cannot create " + reports.string());
    for (const auto& [name, content] : files) write_file(reports / name, content);
}

}  // namespace omh
