#include "fireseg/threat.hpp"

#include <cmath>
#include <stdexcept>

namespace fireseg {

int choose_p(double fps) {
    if (!(fps > 0.0)) throw std::invalid_argument("choose_p: fps must be > 0");
    const long p = std::lround(fps);
    return p < 1 ? 1 : static_cast<int>(p);
}

ThreatTracker::ThreatTracker(int p) : p_(p) {
    if (p < 1) throw std::invalid_argument("ThreatTracker: window length must be >= 1");
}

ThreatSample ThreatTracker::update(std::uint64_t area) {
    areas_.push_back(area);
    running_sum_ += static_cast<double>(area);

    window_.push_back(area);
    window_sum_ += static_cast<double>(area);
    if (window_.size() > static_cast<std::size_t>(p_)) {
        window_sum_ -= static_cast<double>(window_.front());
        window_.pop_front();
    }

    ThreatSample s;
    s.f_mu = running_sum_ / static_cast<double>(areas_.size());
    s.f_mu_p = window_sum_ / static_cast<double>(window_.size());
    s.threat = s.f_mu > 0.0 ? (s.f_mu_p - s.f_mu) / s.f_mu : 0.0;
    return s;
}

int default_alarm_k(double fps) {
    if (!(fps > 0.0)) throw std::invalid_argument("default_alarm_k: fps must be > 0");
    const long k = std::lround(fps / 2.0);
    return k < 1 ? 1 : static_cast<int>(k);
}

bool alarm(const AlarmPolicy& policy, std::span<const double> threat_history) {
    if (policy.k < 1) throw std::invalid_argument("alarm: k must be >= 1");
    if (threat_history.size() < static_cast<std::size_t>(policy.k)) return false;
    for (std::size_t i = threat_history.size() - policy.k; i < threat_history.size(); ++i)
        if (!(threat_history[i] > policy.tau)) return false;
    return true;
}

} // namespace fireseg
