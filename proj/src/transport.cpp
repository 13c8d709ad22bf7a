#include "omh/transport.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "omh/util.hpp"

namespace omh {

std::optional<std::string> HttpResponse::header(const std::string& lowercase_name) const {
    auto it = headers.find(lowercase_name);
    if (it == headers.end()) return std::nullopt;
    return it->second;
}

namespace {

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScriptedTransport::Entry entry_from_json(const nlohmann::json& j, const std::string& base_dir) {
    ScriptedTransport::Entry e;
    if (j.contains("error")) {
        e.is_error = true;
        e.error = j.at("error").get<std::string>();
        return e;
    }
    e.response.status = j.at("status").get<int>();
    if (j.contains("body_file")) {
        auto p = std::filesystem::path(base_dir) / j.at("body_file").get<std::string>();
        e.response.body = read_file_or_throw(p.string());
    } else if (j.contains("body")) {
        e.response.body = j.at("body").get<std::string>();
    }
    if (j.contains("headers")) {
        for (auto& [k, v] : j.at("headers").items())
            e.response.headers[to_lower(k)] = v.get<std::string>();
    }
    return e;
}

}  // namespace

ScriptedTransport ScriptedTransport::from_file(const std::string& path) {
    auto base_dir = std::filesystem::path(path).parent_path().string();
    return from_json_text(read_file_or_throw(path), base_dir);
}

ScriptedTransport ScriptedTransport::from_json_text(const std::string& json_text,
                                                    const std::string& base_dir) {
    ScriptedTransport t;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("response script is not valid JSON: ") + e.what());
    }
    if (j.contains("default")) t.default_ = entry_from_json(j.at("default"), base_dir);
    if (j.contains("responses")) {
        for (auto& [url, spec] : j.at("responses").items()) {
            if (spec.is_array()) {
                for (auto& one : spec) t.scripts_[url].push_back(entry_from_json(one, base_dir));
            } else {
                t.scripts_[url].push_back(entry_from_json(spec, base_dir));
            }
        }
    }
    return t;
}

FetchOutcome ScriptedTransport::fetch(const std::string& url, const FetchOptions&) {
    std::lock_guard<std::mutex> lk(*mu_);
    auto it = scripts_.find(url);
    if (it == scripts_.end()) {
        static const std::string kIdentify = "?verb=Identify";
        if (url.size() > kIdentify.size() &&
            url.compare(url.size() - kIdentify.size(), kIdentify.size(), kIdentify) == 0)
            it = scripts_.find(url.substr(0, url.size() - kIdentify.size()));
    }
    const Entry* entry = nullptr;
    if (it != scripts_.end()) {
        auto& pos = positions_[it->first];
        entry = &it->second[std::min(pos, it->second.size() - 1)];
        ++pos;
    } else if (default_) {
        entry = &*default_;
    } else {
        return FetchOutcome::failure("unscripted url: " + url);
    }
    if (entry->is_error) return FetchOutcome::failure(entry->error);
    return FetchOutcome::success(entry->response);
}

FetchOutcome HttplibTransport::fetch(const std::string& url, const FetchOptions& options) {
    auto parts = split_url(url);
    if (!parts) return FetchOutcome::failure("unparseable url: " + url);
    if (parts->scheme != "http" && parts->scheme != "https")
        return FetchOutcome::failure("unsupported scheme: " +
                                     (parts->scheme.empty() ? "(none)" : parts->scheme));
    if (parts->scheme == "https" && !options.allow_tls)
        return FetchOutcome::failure("tls disabled by configuration");

    std::string origin = parts->scheme + "://" + parts->host;
    if (!parts->port.empty()) origin += ":" + parts->port;
    httplib::Client cli(origin);
    cli.set_follow_location(false);
    cli.set_connection_timeout(options.timeout_seconds, 0);
    cli.set_read_timeout(options.timeout_seconds, 0);
    cli.set_write_timeout(options.timeout_seconds, 0);
    cli.set_keep_alive(false);
    cli.enable_server_certificate_verification(false);  // availability probe, not auth

    httplib::Headers headers = {{"User-Agent", options.user_agent}};

    HttpResponse out;
    out.status = -1;
    bool truncated = false;
    auto res = cli.Get(
        parts->target, headers,
        [&](const httplib::Response& r) {
            out.status = r.status;
            for (auto& [k, v] : r.headers) out.headers[to_lower(k)] = v;
            return true;
        },
        [&](const char* data, size_t n) {
            size_t room = options.max_body_bytes > out.body.size()
                              ? options.max_body_bytes - out.body.size()
                              : 0;
            out.body.append(data, std::min(n, room));
            if (out.body.size() >= options.max_body_bytes) {
                truncated = true;
                return false;  // stop reading, keep what we have
            }
            return true;
        });
    if (res || (truncated && out.status > 0)) return FetchOutcome::success(std::move(out));
    return FetchOutcome::failure(httplib::to_string(res.error()));
}

}  // namespace omh
