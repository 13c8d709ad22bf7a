#include "omh/normalize.hpp"

#include <unordered_set>

#include "omh/util.hpp"

namespace omh {

std::optional<std::string> simple_normalize(const std::string& raw_url) {
    std::string s = trim(raw_url);
    auto cut = s.find_first_of("?#");
    if (cut != std::string::npos) s.erase(cut);
    s = trim(s);
    if (s.empty()) return std::nullopt;
    return s;
}

namespace {

std::string strong_pass(const std::string& in) {
    std::string s = trim(in);
    auto cut = s.find_first_of("?#");
    if (cut != std::string::npos) s.erase(cut);
    if (starts_with_ci(s, "http://")) s.erase(0, 7);
    else if (starts_with_ci(s, "https://")) s.erase(0, 8);
    if (starts_with_ci(s, "www.")) s.erase(0, 4);
    while (!s.empty() && s.back() == '/') s.pop_back();
    auto slash = s.find('/');
    size_t host_len = slash == std::string::npos ? s.size() : slash;
    for (size_t i = 0; i < host_len; ++i)
        s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    return s;
}

}  // namespace

std::optional<NormalizedUrl> strong_normalize(const std::string& url) {
    std::string s = url;
    // iterate to the fixed point; each pass shrinks or stabilizes
    for (;;) {
        std::string next = strong_pass(s);
        if (next == s) break;
        s = std::move(next);
        if (s.empty()) break;
    }
    if (s.empty()) return std::nullopt;
    if (s.find("://") != std::string::npos) return std::nullopt;
    return NormalizedUrl{std::move(s)};
}

std::pair<std::vector<std::string>, std::uint64_t> dedupe(const std::vector<std::string>& urls) {
    std::vector<std::string> unique;
    std::unordered_set<std::string_view> seen;  // views into urls, which outlives the loop
    for (const auto& u : urls) {
        if (!seen.insert(std::string_view(u)).second) continue;
        unique.push_back(u);
    }
    return {std::move(unique), urls.size() - unique.size()};
}

}  // namespace omh
