#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omh/model.hpp"

namespace omh {

// Minimal probe-safe normalization: trims surrounding whitespace and cuts
// the URL at the first "?" (query) or "#" (fragment), whichever comes
// first. Nothing else changes, so the probe still targets the URL as
// listed. Returns nullopt when nothing remains.
std::optional<std::string> simple_normalize(const std::string& raw_url);

// Comparison-key normalization. On top of simple_normalize it strips one
// leading "http://"/"https://" and leading "www." prefixes, strips all
// trailing "/", and lowercases the host (the part before the first "/",
// path case preserved). The whole pass is iterated to a fixed point, so the
// key survives re-normalization unchanged. Returns nullopt when the result
// is empty or still carries a "://" (non-http scheme or embedded URL).
std::optional<NormalizedUrl> strong_normalize(const std::string& url);

// Order-preserving exact dedup; removed = dropped count.
std::pair<std::vector<std::string>, std::uint64_t> dedupe(const std::vector<std::string>& urls);

}  // namespace omh
