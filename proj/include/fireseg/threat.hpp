#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace fireseg {

/// Recency window in frames: one second of video, so round(fps) with a
/// floor of 1. Rejects non-positive rates.
int choose_p(double fps);

struct ThreatSample {
    double f_mu = 0.0;   // mean fire area over the whole sequence so far
    double f_mu_p = 0.0; // mean fire area over the last min(N,P) frames
    double threat = 0.0; // (f_mu_p - f_mu) / f_mu, 0 while f_mu is 0
};

/// Running fire-area history for one sequence. Appends are O(1); the
/// running and window sums are maintained incrementally.
class ThreatTracker {
public:
    explicit ThreatTracker(int p);

    ThreatSample update(std::uint64_t area);

    int p() const { return p_; }
    std::size_t frames() const { return areas_.size(); }
    const std::vector<std::uint64_t>& areas() const { return areas_; }
    double running_sum() const { return running_sum_; }
    double window_sum() const { return window_sum_; }

private:
    int p_;
    std::vector<std::uint64_t> areas_;
    std::deque<std::uint64_t> window_; // last min(N,P) areas
    double running_sum_ = 0.0;
    double window_sum_ = 0.0;
};

struct AlarmPolicy {
    double tau = 0.2; // threat threshold
    int k = 1;        // consecutive frames required

    friend bool operator==(const AlarmPolicy&, const AlarmPolicy&) = default;
};

/// k for a given frame rate: half a second of frames, at least 1.
int default_alarm_k(double fps);

/// True iff the last k threat values all exceed tau (strictly). Fewer than
/// k values recorded means no alarm.
bool alarm(const AlarmPolicy& policy, std::span<const double> threat_history);

} // namespace fireseg
