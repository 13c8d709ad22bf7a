#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace omh {

struct FetchOptions {
    int timeout_seconds = 30;
    std::string user_agent;
    bool allow_tls = true;
    std::size_t max_body_bytes = 1 << 20;
};

struct HttpResponse {
    int status = 0;
    std::map<std::string, std::string> headers;  // keys lowercased
    std::string body;

    std::optional<std::string> header(const std::string& lowercase_name) const;
};

// Either a response (any status) or a transport-level failure.
struct FetchOutcome {
    bool ok = false;
    HttpResponse response;
    std::string error;

    static FetchOutcome success(HttpResponse r) { return {true, std::move(r), {}}; }
    static FetchOutcome failure(std::string why) { return {false, {}, std::move(why)}; }
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual FetchOutcome fetch(const std::string& url, const FetchOptions& options) = 0;
};

// Replays canned responses from a script, so probe runs are network-free.
// Script JSON:
//   { "default": <response>,            // optional fallback
//     "responses": { "<url>": <response> | [<response>, ...] } }
// where <response> is {"status": N, "body": "...", "body_file": "rel/path",
// "headers": {...}} or {"error": "message"}. Lookup tries the exact URL,
// then the URL with a trailing "?verb=Identify" removed, then the default.
// Arrays are consumed one per attempt; the last element repeats.
class ScriptedTransport : public Transport {
public:
    struct Entry {
        bool is_error = false;
        std::string error;
        HttpResponse response;
    };

    static ScriptedTransport from_file(const std::string& path);
    static ScriptedTransport from_json_text(const std::string& json_text,
                                            const std::string& base_dir);

    void set_default(Entry e) { default_ = std::move(e); }
    void add(const std::string& url, Entry e) { scripts_[url].push_back(std::move(e)); }

    FetchOutcome fetch(const std::string& url, const FetchOptions& options) override;

private:
    std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
    std::map<std::string, std::vector<Entry>> scripts_;
    std::map<std::string, std::size_t> positions_;
    std::optional<Entry> default_;
};

// Plain HTTP/1.1 (+TLS) GET client. Sends only the User-Agent header,
// never follows redirects itself (the prober decides), caps body size.
class HttplibTransport : public Transport {
public:
    FetchOutcome fetch(const std::string& url, const FetchOptions& options) override;
};

}  // namespace omh
