#include "orchard/clock.hpp"

#include <thread>

namespace orchard {

SteadyClock::SteadyClock() : epoch_(std::chrono::steady_clock::now()) {}

Clock::duration SteadyClock::now() {
    return std::chrono::duration_cast<duration>(std::chrono::steady_clock::now() - epoch_);
}

void SteadyClock::sleep_for(duration d) {
    if (d > duration::zero()) std::this_thread::sleep_for(d);
}

Clock::duration VirtualClock::now() {
    std::lock_guard lock(mutex_);
    return now_;
}

void VirtualClock::sleep_for(duration d) {
    if (d <= duration::zero()) return;
    std::unique_lock lock(mutex_);
    bool released = false;
    sleepers_.emplace(now_ + d, &released);
    ++sleeping_;
    advance_if_idle();
    wake_.wait(lock, [&] { return released; });
}

void VirtualClock::enlist(std::size_t workers) {
    std::lock_guard lock(mutex_);
    active_ += workers;
}

void VirtualClock::retire() {
    std::lock_guard lock(mutex_);
    if (active_ > 0) --active_;
    advance_if_idle();
}

void VirtualClock::advance_if_idle() {
    if (sleepers_.empty() || sleeping_ < active_) return;
    // Everyone is asleep: jump to the earliest wake-up and release all sleepers due then.
    now_ = std::max(now_, sleepers_.begin()->first);
    while (!sleepers_.empty() && sleepers_.begin()->first <= now_) {
        *sleepers_.begin()->second = true;
        sleepers_.erase(sleepers_.begin());
        --sleeping_;
    }
    wake_.notify_all();
}

}  // namespace orchard
