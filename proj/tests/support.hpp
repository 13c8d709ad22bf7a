#pragma once

// Shared helpers for the unit and acceptance suites: brute-force oracles
// computed straight from membership lists (independent of the analyzer's
// bitmask path), a URL grammar for normalization properties, and an
// instrumented transport for scheduling assertions.

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "omh/clock.hpp"
#include "omh/model.hpp"
#include "omh/transport.hpp"
#include "omh/util.hpp"

namespace omh::testsupport {

// ---- brute-force set oracles ----
// lists[i] holds catalog i's keys (duplicates allowed; membership is what counts)

inline bool member(const std::vector<std::string>& list, const std::string& key) {
    return std::find(list.begin(), list.end(), key) != list.end();
}

inline std::vector<std::string> oracle_universe(const std::vector<std::vector<std::string>>& lists) {
    std::set<std::string> u;
    for (const auto& l : lists) u.insert(l.begin(), l.end());
    return {u.begin(), u.end()};
}

inline std::map<Mask, std::uint64_t> oracle_regions(
    const std::vector<std::vector<std::string>>& lists) {
    std::map<Mask, std::uint64_t> regions;
    for (const auto& key : oracle_universe(lists)) {
        Mask mask = 0;
        for (size_t i = 0; i < lists.size(); ++i)
            if (member(lists[i], key)) mask |= Mask{1} << i;
        if (mask) ++regions[mask];
    }
    return regions;
}

inline std::vector<std::vector<std::uint64_t>> oracle_pairwise(
    const std::vector<std::vector<std::string>>& lists) {
    size_t k = lists.size();
    std::vector<std::vector<std::uint64_t>> m(k, std::vector<std::uint64_t>(k, 0));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            std::set<std::string> seen;
            for (const auto& key : lists[i])
                if (member(lists[j], key) && seen.insert(key).second) ++m[i][j];
        }
    }
    return m;
}

inline std::vector<std::uint64_t> oracle_totals(const std::vector<std::vector<std::string>>& lists) {
    std::vector<std::uint64_t> totals;
    for (const auto& l : lists)
        totals.push_back(std::set<std::string>(l.begin(), l.end()).size());
    return totals;
}

inline std::uint64_t oracle_specific_count(const std::vector<std::vector<std::string>>& lists) {
    std::uint64_t count = 0;
    for (const auto& key : oracle_universe(lists)) {
        int in = 0;
        for (const auto& l : lists)
            if (member(l, key)) ++in;
        if (in == 1) ++count;
    }
    return count;
}

inline std::vector<std::string> oracle_all_common(
    const std::vector<std::vector<std::string>>& lists) {
    std::vector<std::string> keys;
    for (const auto& key : oracle_universe(lists)) {
        bool everywhere = true;
        for (const auto& l : lists)
            if (!member(l, key)) everywhere = false;
        if (everywhere) keys.push_back(key);
    }
    return keys;  // universe is already sorted
}

// Random overlap instance over already-strong keys; every key appears in at
// least one catalog.
inline std::vector<std::vector<std::string>> random_instance(std::mt19937& rng, int max_catalogs,
                                                             int max_urls) {
    std::uniform_int_distribution<int> k_dist(1, max_catalogs);
    std::uniform_int_distribution<int> n_dist(1, max_urls);
    int k = k_dist(rng);
    int n = n_dist(rng);
    std::vector<std::vector<std::string>> lists(k);
    std::uniform_int_distribution<int> coin(0, 99);
    for (int u = 0; u < n; ++u) {
        std::string key = "u" + std::to_string(u) + ".example.org/oai";
        bool placed = false;
        for (int c = 0; c < k; ++c) {
            if (coin(rng) < 40) {
                lists[c].push_back(key);
                placed = true;
            }
        }
        if (!placed) lists[std::uniform_int_distribution<int>(0, k - 1)(rng)].push_back(key);
    }
    return lists;
}

// ---- URL grammar for normalization properties ----

inline std::string random_label(std::mt19937& rng) {
    static const char* alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::uniform_int_distribution<int> len(1, 8);
    std::uniform_int_distribution<int> pick(0, 61);
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i) s += alphabet[pick(rng)];
    return s;
}

// host + path, no scheme and no leading www: the collapsible base
inline std::string random_url_base(std::mt19937& rng) {
    std::uniform_int_distribution<int> labels(1, 3);
    std::uniform_int_distribution<int> segs(0, 3);
    std::uniform_int_distribution<int> coin(0, 1);
    std::string s = random_label(rng);
    int hl = labels(rng);
    for (int i = 0; i < hl; ++i) s += "." + random_label(rng);
    if (coin(rng) == 0) s += ":8080";
    int ps = segs(rng);
    for (int i = 0; i < ps; ++i) s += "/" + random_label(rng);
    return s;
}

inline std::string random_url(std::mt19937& rng) {
    static const char* schemes[] = {"", "http://", "https://", "HTTP://", "HtTpS://"};
    static const char* wwws[] = {"", "www.", "WWW.", "wWw.", "www2."};
    static const char* tails[] = {"", "/", "//", "?verb=Identify&x=1", "?a=1?b=2", "#frag", "/?q"};
    std::uniform_int_distribution<int> s(0, 4), w(0, 4), t(0, 6), pad(0, 1);
    std::string url = std::string(schemes[s(rng)]) + wwws[w(rng)] + random_url_base(rng) +
                      tails[t(rng)];
    if (pad(rng)) url = "  " + url + " ";
    return url;
}

// ---- instrumented transport ----

class RecordingTransport : public Transport {
public:
    struct Dispatch {
        std::string url;
        std::string host;
        TimeMs at;
    };

    RecordingTransport(Transport& inner, Clock& clock) : inner_(inner), clock_(clock) {}

    FetchOutcome fetch(const std::string& url, const FetchOptions& options) override {
        {
            std::lock_guard<std::mutex> lk(mu_);
            ++outstanding_;
            max_outstanding_ = std::max(max_outstanding_, outstanding_);
            dispatches_.push_back({url, host_of(url), clock_.now_ms()});
        }
        auto out = inner_.fetch(url, options);
        {
            std::lock_guard<std::mutex> lk(mu_);
            --outstanding_;
        }
        return out;
    }

    std::vector<Dispatch> dispatches() const {
        std::lock_guard<std::mutex> lk(mu_);
        return dispatches_;
    }
    int max_outstanding() const {
        std::lock_guard<std::mutex> lk(mu_);
        return max_outstanding_;
    }

    // smallest same-host gap observed, or a huge sentinel when hosts never repeat
    TimeMs min_same_host_gap() const {
        std::lock_guard<std::mutex> lk(mu_);
        std::map<std::string, std::vector<TimeMs>> by_host;
        for (const auto& d : dispatches_) by_host[d.host].push_back(d.at);
        TimeMs min_gap = std::numeric_limits<TimeMs>::max();
        for (auto& [host, times] : by_host) {
            std::sort(times.begin(), times.end());
            for (size_t i = 1; i < times.size(); ++i)
                min_gap = std::min(min_gap, times[i] - times[i - 1]);
        }
        return min_gap;
    }

private:
    Transport& inner_;
    Clock& clock_;
    mutable std::mutex mu_;
    std::vector<Dispatch> dispatches_;
    int outstanding_ = 0;
    int max_outstanding_ = 0;
};

inline ScriptedTransport::Entry ok_entry(int status, std::string body) {
    ScriptedTransport::Entry e;
    e.response.status = status;
    e.response.body = std::move(body);
    return e;
}

inline ScriptedTransport::Entry redirect_entry(int status, const std::string& location) {
    ScriptedTransport::Entry e;
    e.response.status = status;
    e.response.headers["location"] = location;
    return e;
}

inline ScriptedTransport::Entry error_entry(std::string why) {
    ScriptedTransport::Entry e;
    e.is_error = true;
    e.error = std::move(why);
    return e;
}

// Minimal valid Identify body used across probe tests.
inline std::string identify_body(const std::string& name = "Demo Repository",
                                 const std::string& version = "2.0",
                                 const std::string& earliest = "2005-01-01") {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\">\n"
           "  <responseDate>2017-01-15T12:00:00Z</responseDate>\n"
           "  <request verb=\"Identify\">http://example.org/oai</request>\n"
           "  <Identify>\n"
           "    <repositoryName>" + name + "</repositoryName>\n"
           "    <baseURL>http://example.org/oai</baseURL>\n"
           "    <protocolVersion>" + version + "</protocolVersion>\n"
           "    <earliestDatestamp>" + earliest + "</earliestDatestamp>\n"
           "  </Identify>\n"
           "</OAI-PMH>\n";
}

}  // namespace omh::testsupport
