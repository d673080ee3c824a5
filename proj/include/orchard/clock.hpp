#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <mutex>

namespace orchard {

/// Time source for the execution engine and the backends it drives.
///
/// Worker threads that may sleep on the clock are announced with enlist()
/// before they start and call retire() when they exit. Real clocks ignore
/// both; the virtual clock uses them to know when every worker is idle.
class Clock {
public:
    using duration = std::chrono::nanoseconds;

    virtual ~Clock() = default;
    virtual duration now() = 0;
    virtual void sleep_for(duration d) = 0;
    virtual void enlist(std::size_t /*workers*/) {}
    virtual void retire() {}
};

class SteadyClock final : public Clock {
public:
    SteadyClock();
    duration now() override;
    void sleep_for(duration d) override;

private:
    std::chrono::steady_clock::time_point epoch_;
};

/// Discrete-event clock. Time only moves when every enlisted worker is
/// blocked in sleep_for; it then jumps to the earliest pending wake-up.
/// Runs that sleep on this clock finish instantly in real time and report
/// the same timings on every run.
class VirtualClock final : public Clock {
public:
    duration now() override;
    void sleep_for(duration d) override;
    void enlist(std::size_t workers) override;
    void retire() override;

private:
    void advance_if_idle();  // requires mutex_

    std::mutex mutex_;
    std::condition_variable wake_;
    duration now_{0};
    std::size_t active_ = 0;
    std::size_t sleeping_ = 0;
    std::multimap<duration, bool*> sleepers_;
};

}  // namespace orchard
