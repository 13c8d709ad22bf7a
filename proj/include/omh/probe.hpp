#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "omh/clock.hpp"
#include "omh/model.hpp"
#include "omh/transport.hpp"

namespace omh {

struct ProbeConfig {
    int max_in_flight = 64;
    std::int64_t per_host_delay_ms = 1000;
    int timeout_seconds = 30;
    int retries = 2;                               // additional attempts
    std::int64_t retry_spacing_ms = 3600 * 1000;   // between attempt waves
    std::string user_agent = "omh-prober/1.0 (endpoint availability survey)";
    int follow_redirects = 5;
    bool allow_tls = true;
    std::size_t max_body_bytes = 1 << 20;
};

// Throws ConfigError when bounds are violated (max_in_flight >= 1, ...).
void validate_probe_config(const ProbeConfig& config);

// probe_url + "?verb=Identify". The input must be simple-normalized
// already; a '?' in it is a contract violation and throws ConfigError.
std::string build_identify_url(const std::string& probe_url);

struct Classification {
    ProbeOutcome outcome = ProbeOutcome::WrongSuccess;
    std::optional<int> http_status;
    std::optional<std::string> repository_name;
    std::optional<std::string> protocol_version;
    std::optional<std::string> earliest_datestamp;
};

// Maps a received response to one of the four outcomes. Status != 200 is
// HttpError. A 200 is Reachable only when the body parses as XML with an
// "OAI-PMH" root (namespace prefixes ignored) containing an Identify
// element and no protocol error element; anything else is WrongSuccess.
Classification classify_response(int http_status, const std::string& body,
                                 std::size_t max_body_bytes = 1 << 20);

// Probes every URL once (plus retries on transport errors and retryable
// 5xx statuses), respecting per-host dispatch spacing and the in-flight
// bound. Returns exactly one record per input URL, in input order. With a
// scripted transport and a VirtualClock the run is deterministic.
std::vector<ProbeRecord> probe_all(const std::vector<std::string>& urls,
                                   const ProbeConfig& config, Clock& clock,
                                   Transport& transport);

struct OutcomeSummary {
    std::uint64_t success_count = 0;
    std::uint64_t error_count = 0;
    double success_fraction = 0.0;  // exact, unrounded
    double error_fraction = 0.0;
    // bucket -> share of error_count; keys are "400".."599",
    // "wrong_success_200" and "transport"
    std::map<std::string, std::uint64_t> error_counts;
    std::map<std::string, double> error_fractions;
};

OutcomeSummary summarize_outcomes(const std::vector<ProbeRecord>& records);

// Resolves a Location header against the request URL (absolute,
// protocol-relative, root-relative and path-relative forms).
std::string resolve_location(const std::string& base_url, const std::string& location);

}  // namespace omh
