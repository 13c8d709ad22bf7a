#include "omh/model.hpp"

#include <algorithm>
#include <unordered_set>

#include "omh/normalize.hpp"
#include "omh/util.hpp"

namespace omh {

bool valid_catalog_token(const std::string& id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

void validate_catalog_order(const std::vector<CatalogId>& order) {
    if (order.size() > static_cast<size_t>(kMaxCatalogs))
        throw ConfigError("too many catalogs: " + std::to_string(order.size()) + " (max " +
                          std::to_string(kMaxCatalogs) + ")");
    std::unordered_set<std::string> seen;
    for (const auto& c : order) {
        if (!valid_catalog_token(c.id))
            throw ConfigError("invalid catalog id \"" + c.id + "\" (want non-empty [a-z0-9_-])");
        if (!seen.insert(c.id).second)
            throw ConfigError("duplicate catalog id \"" + c.id + "\"");
    }
}

CatalogSnapshot make_snapshot(CatalogId catalog, std::int64_t harvested_at,
                              std::uint64_t all_items, std::uint64_t only_oai,
                              std::vector<std::string> entries_simple) {
    CatalogSnapshot snap;
    snap.catalog = std::move(catalog);
    snap.harvested_at = harvested_at;
    snap.all_items = all_items;
    snap.only_oai = only_oai;

    std::vector<std::string> strong_keys;
    strong_keys.reserve(entries_simple.size());
    for (const auto& url : entries_simple) {
        auto strong = strong_normalize(url);
        if (!strong) {
            log_warn("catalog " + snap.catalog.id + ": dropping entry with no comparable form: \"" +
                     url + "\"");
            continue;
        }
        strong_keys.push_back(std::move(strong->key));
    }
    auto [unique_keys, removed] = dedupe(strong_keys);
    (void)removed;

    snap.entries_simple = std::move(entries_simple);
    snap.entries_strong.reserve(unique_keys.size());
    for (auto& k : unique_keys) snap.entries_strong.push_back(NormalizedUrl{std::move(k)});

    if (snap.only_oai > snap.all_items || snap.entries_simple.size() > snap.only_oai)
        throw ConfigError("catalog " + snap.catalog.id +
                          ": count chain violated (all_items >= only_oai >= unique)");
    return snap;
}

const char* outcome_name(ProbeOutcome o) {
    switch (o) {
        case ProbeOutcome::Reachable: return "reachable";
        case ProbeOutcome::WrongSuccess: return "wrong_success";
        case ProbeOutcome::HttpError: return "http_error";
        case ProbeOutcome::TransportError: return "transport_error";
    }
    return "?";
}

std::optional<ProbeOutcome> outcome_from_name(const std::string& name) {
    if (name == "reachable") return ProbeOutcome::Reachable;
    if (name == "wrong_success") return ProbeOutcome::WrongSuccess;
    if (name == "http_error") return ProbeOutcome::HttpError;
    if (name == "transport_error") return ProbeOutcome::TransportError;
    return std::nullopt;
}

Mask mask_of(const std::set<std::string>& catalogs, const std::vector<CatalogId>& order) {
    Mask mask = 0;
    for (const auto& id : catalogs) {
        auto it = std::find_if(order.begin(), order.end(),
                               [&](const CatalogId& c) { return c.id == id; });
        if (it == order.end())
            throw ConfigError("unknown catalog id \"" + id + "\" (not in catalog order)");
        mask |= Mask{1} << (it - order.begin());
    }
    return mask;
}

std::string subset_name(Mask mask, const std::vector<CatalogId>& order) {
    std::string name;
    for (size_t i = 0; i < order.size(); ++i) {
        if (mask & (Mask{1} << i)) {
            if (!name.empty()) name += '&';
            name += order[i].id;
        }
    }
    return name;
}

}  // namespace omh
