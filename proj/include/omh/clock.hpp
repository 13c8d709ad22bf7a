#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>

namespace omh {

// Time is carried as UTC milliseconds since epoch so virtual and real
// clocks share one currency.
using TimeMs = std::int64_t;

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimeMs now_ms() = 0;
    virtual void sleep_until_ms(TimeMs t) = 0;

    // Worker-accounting hooks used by the virtual clock to know when every
    // active thread is asleep. No-ops on the real clock.
    virtual void register_worker() {}
    virtual void unregister_worker() {}
    virtual void enter_idle() {}
    virtual void exit_idle() {}

    std::int64_t now_seconds() { return now_ms() / 1000; }
};

class SystemClock : public Clock {
public:
    TimeMs now_ms() override;
    void sleep_until_ms(TimeMs t) override;
};

// Deterministic discrete-event clock. Virtual time advances only when every
// registered (non-idle) worker is blocked in sleep_until_ms; it then jumps
// to the earliest requested wake time. This makes multi-threaded probing
// reproducible: the schedule depends on the task set, never on OS timing.
class VirtualClock : public Clock {
public:
    explicit VirtualClock(TimeMs start_ms) : now_(start_ms) {}

    TimeMs now_ms() override;
    void sleep_until_ms(TimeMs t) override;
    void register_worker() override;
    void unregister_worker() override;
    void enter_idle() override;
    void exit_idle() override;

    // Manual advancement for single-threaded tests.
    void advance_ms(TimeMs delta);

private:
    void maybe_advance_locked();

    std::mutex mu_;
    std::condition_variable cv_;
    TimeMs now_;
    int active_ = 0;
    std::multiset<TimeMs> wake_targets_;
};

}  // namespace omh
