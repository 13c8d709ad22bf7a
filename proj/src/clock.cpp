#include "omh/clock.hpp"

#include <chrono>
#include <thread>

namespace omh {

TimeMs SystemClock::now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void SystemClock::sleep_until_ms(TimeMs t) {
    auto target = std::chrono::system_clock::time_point(std::chrono::milliseconds(t));
    std::this_thread::sleep_until(target);
}

TimeMs VirtualClock::now_ms() {
    std::lock_guard<std::mutex> lk(mu_);
    return now_;
}

void VirtualClock::maybe_advance_locked() {
    // every active worker is parked in sleep_until_ms: jump to the earliest
    // wake target and release the sleepers that reached it
    if (active_ > 0 && static_cast<int>(wake_targets_.size()) >= active_ &&
        !wake_targets_.empty()) {
        TimeMs target = *wake_targets_.begin();
        if (target > now_) now_ = target;
        cv_.notify_all();
    }
}

void VirtualClock::sleep_until_ms(TimeMs t) {
    std::unique_lock<std::mutex> lk(mu_);
    if (t <= now_) return;
    auto it = wake_targets_.insert(t);
    maybe_advance_locked();
    cv_.wait(lk, [&] { return now_ >= t; });
    wake_targets_.erase(it);
}

void VirtualClock::register_worker() {
    std::lock_guard<std::mutex> lk(mu_);
    ++active_;
}

void VirtualClock::unregister_worker() {
    std::lock_guard<std::mutex> lk(mu_);
    --active_;
    maybe_advance_locked();
}

void VirtualClock::enter_idle() {
    std::lock_guard<std::mutex> lk(mu_);
    --active_;
    maybe_advance_locked();
}

void VirtualClock::exit_idle() {
    std::lock_guard<std::mutex> lk(mu_);
    ++active_;
}

void VirtualClock::advance_ms(TimeMs delta) {
    std::lock_guard<std::mutex> lk(mu_);
    now_ += delta;
    cv_.notify_all();
}

}  // namespace omh
