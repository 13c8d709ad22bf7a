#include "omh/probe.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "omh/normalize.hpp"
#include "omh/util.hpp"

namespace omh {

void validate_probe_config(const ProbeConfig& config) {
    if (config.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (config.follow_redirects < 0) throw ConfigError("follow_redirects must be >= 0");
    if (config.retries < 0) throw ConfigError("retries must be >= 0");
    if (config.per_host_delay_ms < 0) throw ConfigError("per_host_delay must be >= 0");
}

std::string build_identify_url(const std::string& probe_url) {
    if (probe_url.find('?') != std::string::npos)
        throw ConfigError("probe url still carries a query (run simple normalization first): " +
                          probe_url);
    return probe_url + "?verb=Identify";
}

namespace {

std::string local_name(const std::string& element) {
    auto colon = element.rfind(':');
    return colon == std::string::npos ? element : element.substr(colon + 1);
}

bool special_node(const std::string& key) {
    return !key.empty() && key.front() == '<';  // <xmlattr>, <xmlcomment>, ...
}

}  // namespace

Classification classify_response(int http_status, const std::string& body,
                                 std::size_t max_body_bytes) {
    Classification c;
    c.http_status = http_status;
    if (http_status != 200) {
        c.outcome = ProbeOutcome::HttpError;
        return c;
    }
    c.outcome = ProbeOutcome::WrongSuccess;

    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(body.size() > max_body_bytes ? body.substr(0, max_body_bytes)
                                                           : body);
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error&) {
        return c;
    }

    // first real element is the document root
    const pt::ptree* root = nullptr;
    std::string root_name;
    for (const auto& [key, child] : tree) {
        if (special_node(key)) continue;
        root_name = local_name(key);
        root = &child;
        break;
    }
    if (!root || root_name != "OAI-PMH") return c;

    const pt::ptree* identify = nullptr;
    bool has_error = false;
    for (const auto& [key, child] : *root) {
        if (special_node(key)) continue;
        auto name = local_name(key);
        if (name == "Identify" && !identify) identify = &child;
        if (name == "error") has_error = true;
    }
    if (!identify || has_error) return c;  // protocol error answers are not reachable

    c.outcome = ProbeOutcome::Reachable;
    for (const auto& [key, child] : *identify) {
        if (special_node(key)) continue;
        auto name = local_name(key);
        auto text = trim(child.get_value<std::string>());
        if (text.empty()) continue;
        if (name == "repositoryName" && !c.repository_name) c.repository_name = text;
        else if (name == "protocolVersion" && !c.protocol_version) c.protocol_version = text;
        else if (name == "earliestDatestamp" && !c.earliest_datestamp) c.earliest_datestamp = text;
    }
    return c;
}

std::string resolve_location(const std::string& base_url, const std::string& location) {
    std::string loc = trim(location);
    if (loc.find("://") != std::string::npos) return loc;
    auto parts = split_url(base_url);
    std::string scheme = parts && !parts->scheme.empty() ? parts->scheme : "http";
    if (loc.rfind("//", 0) == 0) return scheme + ":" + loc;
    std::string authority;
    if (parts) {
        authority = parts->host;
        if (!parts->port.empty()) authority += ":" + parts->port;
    }
    if (!loc.empty() && loc.front() == '/') return scheme + "://" + authority + loc;
    // path-relative: replace everything after the last path segment
    std::string target = parts ? parts->target : "/";
    auto query = target.find('?');
    if (query != std::string::npos) target.erase(query);
    auto last_slash = target.rfind('/');
    target = last_slash == std::string::npos ? "/" : target.substr(0, last_slash + 1);
    return scheme + "://" + authority + target + loc;
}

namespace {

bool retryable_status(int status) {
    return status == 500 || status == 502 || status == 503 || status == 504;
}

bool redirect_status(int status) { return status >= 300 && status < 400; }

struct Task {
    std::size_t url_index;  // doubles as the deterministic tie-break
    int attempt;            // 1-based wave counter
    std::string url;        // current fetch target (identify URL or redirect)
    int hops_left;
    TimeMs not_before;
};

// Bounded worker pool over a shared task list. All scheduling decisions
// happen under one lock and order by (effective dispatch time, url_index),
// so runs with a VirtualClock and an instantaneous transport replay
// identically. At most one live task exists per URL at any time.
class ProbeEngine {
public:
    ProbeEngine(const std::vector<std::string>& urls, const ProbeConfig& config, Clock& clock,
                Transport& transport)
        : urls_(urls), config_(config), clock_(clock), transport_(transport) {
        results_.resize(urls.size());
        TimeMs start = clock_.now_ms();
        for (std::size_t i = 0; i < urls.size(); ++i) {
            queue_.push_back(Task{i, 1, build_identify_url(urls[i]), config_.follow_redirects,
                                  start});
        }
    }

    std::vector<ProbeRecord> run() {
        std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(config_.max_in_flight), urls_.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back([this] { worker(); });
        for (auto& t : pool) t.join();

        std::vector<ProbeRecord> out;
        out.reserve(results_.size());
        for (auto& r : results_) out.push_back(std::move(*r));
        return out;
    }

private:
    void worker() {
        clock_.register_worker();
        std::unique_lock<std::mutex> lk(mu_);
        while (!(queue_.empty() && in_flight_ == 0)) {
            if (queue_.empty()) {
                // completions may still requeue retries
                clock_.enter_idle();
                cv_.wait(lk, [&] { return !queue_.empty() || in_flight_ == 0; });
                clock_.exit_idle();
                continue;
            }
            TimeMs now = clock_.now_ms();
            std::size_t best = queue_.size();
            TimeMs best_time = 0;
            for (std::size_t i = 0; i < queue_.size(); ++i) {
                TimeMs eff = effective_time(queue_[i]);
                if (best == queue_.size() || eff < best_time ||
                    (eff == best_time && queue_[i].url_index < queue_[best].url_index)) {
                    best = i;
                    best_time = eff;
                }
            }
            if (best_time > now) {
                lk.unlock();
                clock_.sleep_until_ms(best_time);
                lk.lock();
                continue;  // re-evaluate: the queue may have changed
            }
            Task task = std::move(queue_[best]);
            queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(best));
            host_next_ok_[host_of(task.url)] = now + config_.per_host_delay_ms;
            ++in_flight_;
            lk.unlock();

            FetchOptions options{config_.timeout_seconds, config_.user_agent, config_.allow_tls,
                                 config_.max_body_bytes};
            FetchOutcome outcome = transport_.fetch(task.url, options);

            lk.lock();
            --in_flight_;
            handle_completion(std::move(task), std::move(outcome));
            cv_.notify_all();
        }
        cv_.notify_all();
        lk.unlock();
        clock_.unregister_worker();
    }

    TimeMs effective_time(const Task& t) {
        auto it = host_next_ok_.find(host_of(t.url));
        TimeMs host_ok = it == host_next_ok_.end() ? 0 : it->second;
        return std::max(t.not_before, host_ok);
    }

    // lock held
    void handle_completion(Task task, FetchOutcome outcome) {
        TimeMs now = clock_.now_ms();
        if (outcome.ok) {
            const HttpResponse& resp = outcome.response;
            if (redirect_status(resp.status)) {
                auto location = resp.header("location");
                if (location && task.hops_left > 0) {
                    task.url = resolve_location(task.url, *location);
                    --task.hops_left;
                    task.not_before = now;
                    queue_.push_back(std::move(task));
                    return;
                }
                // hop budget exhausted or no target: the 3xx is the final word
                emit(task, classify_response(resp.status, resp.body, config_.max_body_bytes),
                     now);
                return;
            }
            if (retryable_status(resp.status) && task.attempt <= config_.retries) {
                requeue_retry(std::move(task), now);
                return;
            }
            emit(task, classify_response(resp.status, resp.body, config_.max_body_bytes), now);
            return;
        }
        if (task.attempt <= config_.retries) {
            requeue_retry(std::move(task), now);
            return;
        }
        Classification c;
        c.outcome = ProbeOutcome::TransportError;
        c.http_status.reset();
        emit(task, c, now);
    }

    void requeue_retry(Task task, TimeMs now) {
        task.attempt += 1;
        task.url = build_identify_url(urls_[task.url_index]);  // restart from the original
        task.hops_left = config_.follow_redirects;
        task.not_before = now + config_.retry_spacing_ms;
        queue_.push_back(std::move(task));
    }

    void emit(const Task& task, const Classification& c, TimeMs now) {
        ProbeRecord rec;
        rec.probe_url = urls_[task.url_index];
        auto strong = strong_normalize(rec.probe_url);
        rec.normalized = strong ? *strong : NormalizedUrl{};
        rec.outcome = c.outcome;
        rec.http_status = c.http_status;
        rec.repository_name = c.repository_name;
        rec.protocol_version = c.protocol_version;
        rec.earliest_datestamp = c.earliest_datestamp;
        rec.attempts = task.attempt;
        rec.completed_at = now / 1000;
        results_[task.url_index] = std::move(rec);
    }

    const std::vector<std::string>& urls_;
    const ProbeConfig& config_;
    Clock& clock_;
    Transport& transport_;

    std::mutex mu_;
    std::condition_variable cv_;
    std::vector<Task> queue_;
    std::map<std::string, TimeMs> host_next_ok_;
    int in_flight_ = 0;
    std::vector<std::optional<ProbeRecord>> results_;
};

}  // namespace

std::vector<ProbeRecord> probe_all(const std::vector<std::string>& urls,
                                   const ProbeConfig& config, Clock& clock,
                                   Transport& transport) {
    validate_probe_config(config);
    if (urls.empty()) return {};
    ProbeEngine engine(urls, config, clock, transport);
    return engine.run();
}

OutcomeSummary summarize_outcomes(const std::vector<ProbeRecord>& records) {
    OutcomeSummary s;
    for (const auto& r : records) {
        if (r.outcome == ProbeOutcome::Reachable) {
            ++s.success_count;
            continue;
        }
        ++s.error_count;
        std::string bucket;
        switch (r.outcome) {
            case ProbeOutcome::WrongSuccess: bucket = "wrong_success_200"; break;
            case ProbeOutcome::TransportError: bucket = "transport"; break;
            case ProbeOutcome::HttpError: bucket = std::to_string(r.http_status.value_or(0)); break;
            case ProbeOutcome::Reachable: break;
        }
        ++s.error_counts[bucket];
    }
    std::uint64_t total = s.success_count + s.error_count;
    if (total > 0) {
        s.success_fraction = static_cast<double>(s.success_count) / static_cast<double>(total);
        s.error_fraction = 1.0 - s.success_fraction;  // the pair sums to 1 exactly
    }
    for (const auto& [bucket, count] : s.error_counts)
        s.error_fractions[bucket] =
            static_cast<double>(count) / static_cast<double>(s.error_count);
    return s;
}

}  // namespace omh
