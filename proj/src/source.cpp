#include "omh/source.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omh/util.hpp"

namespace omh {

namespace {

ExtractionStep::Kind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "PatternExtract") return ExtractionStep::Kind::PatternExtract;
    if (s == "LinkFollow") return ExtractionStep::Kind::LinkFollow;
    throw ManifestError(where + ": unknown step kind \"" + s +
                        "\" (want PatternExtract or LinkFollow)");
}

ExtractionStep step_from_json(const nlohmann::json& j, const std::string& where) {
    ExtractionStep step;
    if (!j.is_object()) throw ManifestError(where + ": step is not an object");
    for (auto& [key, _] : j.items()) {
        if (key != "kind" && key != "fetch_url" && key != "pattern" && key != "capture_group")
            throw ManifestError(where + ": unknown step field \"" + key + "\"");
    }
    if (!j.contains("kind")) throw ManifestError(where + ": step missing \"kind\"");
    step.kind = kind_from_string(j.at("kind").get<std::string>(), where);
    if (j.contains("fetch_url")) step.fetch_url = j.at("fetch_url").get<std::string>();
    if (!j.contains("pattern")) throw ManifestError(where + ": step missing \"pattern\"");
    step.pattern_text = j.at("pattern").get<std::string>();
    step.capture_group = j.value("capture_group", 1);

    try {
        // ECMAScript grammar: non-greedy quantifiers supported, '.' does not
        // match newlines, so matching is effectively per line
        step.pattern = std::regex(step.pattern_text);
    } catch (const std::regex_error& e) {
        throw ManifestError(where + ": pattern \"" + step.pattern_text +
                            "\" does not compile: " + e.what());
    }
    if (step.capture_group < 1 ||
        static_cast<size_t>(step.capture_group) > step.pattern.mark_count())
        throw ManifestError(where + ": capture_group " + std::to_string(step.capture_group) +
                            " out of range (pattern has " +
                            std::to_string(step.pattern.mark_count()) + " groups)");
    return step;
}

}  // namespace

std::vector<SourceManifest> parse_manifest(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ManifestError("manifest root must be a list of sources");

    std::vector<SourceManifest> manifests;
    std::vector<CatalogId> order;
    for (size_t i = 0; i < doc.size(); ++i) {
        const auto& j = doc[i];
        std::string where = "source #" + std::to_string(i + 1);
        if (!j.is_object()) throw ManifestError(where + ": not an object");
        for (auto& [key, _] : j.items()) {
            if (key != "id" && key != "display_name" && key != "steps" && key != "notes")
                throw ManifestError(where + ": unknown field \"" + key + "\"");
        }
        SourceManifest m;
        if (!j.contains("id")) throw ManifestError(where + ": missing \"id\"");
        m.catalog.id = j.at("id").get<std::string>();
        where = "source \"" + m.catalog.id + "\"";
        m.catalog.display_name = j.value("display_name", m.catalog.id);
        m.notes = j.value("notes", "");
        if (!j.contains("steps") || !j.at("steps").is_array() || j.at("steps").empty())
            throw ManifestError(where + ": needs a non-empty \"steps\" list");
        const auto& steps = j.at("steps");
        if (steps.size() > 2)
            throw ManifestError(where + ": at most 2 steps allowed, got " +
                                std::to_string(steps.size()));
        for (size_t s = 0; s < steps.size(); ++s)
            m.steps.push_back(
                step_from_json(steps[s], where + " step " + std::to_string(s + 1)));

        if (m.steps.size() == 1) {
            if (m.steps[0].kind != ExtractionStep::Kind::PatternExtract)
                throw ManifestError(where + ": a single step must be PatternExtract");
        } else {
            if (m.steps[0].kind != ExtractionStep::Kind::LinkFollow ||
                m.steps[1].kind != ExtractionStep::Kind::PatternExtract)
                throw ManifestError(where +
                                    ": two-step sources must be LinkFollow then PatternExtract");
        }
        if (m.steps[0].fetch_url.empty())
            throw ManifestError(where + ": step 1 needs a fetch_url");
        order.push_back(m.catalog);
        manifests.push_back(std::move(m));
    }
    try {
        validate_catalog_order(order);
    } catch (const ConfigError& e) {
        throw ManifestError(e.what());
    }
    return manifests;
}

std::vector<SourceManifest> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot open manifest: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

DocumentFetcher::Result FileFetcher::fetch(const std::string& ref) {
    if (!ref.starts_with("file:"))
        return {false, {}, "fixture mode resolves only file: references, got \"" + ref + "\""};
    auto rel = ref.substr(5);
    auto path = std::filesystem::path(fixtures_dir_) / rel;
    std::ifstream in(path, std::ios::binary);
    if (!in) return {false, {}, "cannot open fixture " + path.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return {true, sanitize_utf8(ss.str()), {}};
}

DocumentFetcher::Result LiveFetcher::fetch(const std::string& ref) {
    if (ref.starts_with("file:")) {
        FileFetcher file(fixtures_dir_);
        return file.fetch(ref);
    }
    std::string url = ref;
    for (int hop = 0; hop <= max_redirects_; ++hop) {
        std::string host = host_of(url);
        auto it = host_next_ok_.find(host);
        if (it != host_next_ok_.end()) clock_.sleep_until_ms(it->second);
        host_next_ok_[host] = clock_.now_ms() + per_host_delay_ms_;

        FetchOutcome out = transport_.fetch(url, options_);
        if (!out.ok) return {false, {}, out.error};
        if (out.response.status >= 300 && out.response.status < 400) {
            auto location = out.response.header("location");
            if (location && hop < max_redirects_) {
                url = *location;
                continue;
            }
        }
        if (out.response.status != 200)
            return {false, {}, "http status " + std::to_string(out.response.status)};
        return {true, sanitize_utf8(out.response.body), {}};
    }
    return {false, {}, "redirect limit exceeded"};
}

namespace {

struct ExtractStats {
    std::vector<std::string> captures;  // non-empty, trimmed
    std::uint64_t match_count = 0;
};

ExtractStats extract_with_count(const std::string& document, const ExtractionStep& step) {
    ExtractStats out;
    auto begin = std::sregex_iterator(document.begin(), document.end(), step.pattern);
    auto end = std::sregex_iterator();
    for (auto it = begin; it != end; ++it) {
        ++out.match_count;
        std::string captured = trim(it->str(static_cast<size_t>(step.capture_group)));
        if (!captured.empty()) out.captures.push_back(std::move(captured));
    }
    return out;
}

}  // namespace

std::vector<std::string> extract_entries(const std::string& document, const ExtractionStep& step) {
    return extract_with_count(document, step).captures;
}

FollowResult follow_links(const std::string& document, const ExtractionStep& step,
                          DocumentFetcher& fetcher) {
    FollowResult result;
    auto links = extract_entries(document, step);
    result.documents.reserve(links.size());
    for (const auto& link : links) {
        auto doc = fetcher.fetch(link);
        if (!doc.ok) {
            log_warn("link fetch failed (" + link + "): " + doc.error);
            ++result.failed;
            result.documents.emplace_back();
            continue;
        }
        result.documents.push_back(std::move(doc.text));
    }
    return result;
}

HarvestResult harvest_catalog(const SourceManifest& manifest, DocumentFetcher& fetcher) {
    const auto& first = manifest.steps.front();
    auto root = fetcher.fetch(first.fetch_url);
    if (!root.ok)
        throw HarvestError("catalog " + manifest.catalog.id + ": root document unfetchable (" +
                           first.fetch_url + "): " + root.error);

    HarvestResult result;
    auto add_entries = [&](std::vector<std::string>&& urls) {
        for (auto& u : urls)
            result.entries.push_back(RawRepositoryEntry{manifest.catalog.id, std::move(u), {}});
    };

    if (manifest.steps.size() == 1) {
        auto stats = extract_with_count(root.text, first);
        result.all_items = stats.match_count;
        add_entries(std::move(stats.captures));
        return result;
    }

    auto followed = follow_links(root.text, first, fetcher);
    result.all_items = followed.documents.size();
    result.link_failures = followed.failed;
    const auto& second = manifest.steps[1];
    for (const auto& page : followed.documents) {
        auto stats = extract_with_count(page, second);
        add_entries(std::move(stats.captures));
    }
    return result;
}

}  // namespace omh
