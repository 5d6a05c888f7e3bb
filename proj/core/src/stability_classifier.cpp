#include <algorithm>
#include <cmath>
#include <numeric>

#include "seaz/error.hpp"
#include "seaz/simulate.hpp"

namespace seaz::sim {

std::string_view to_string(Outcome o) { return o == Outcome::Stable ? "stable" : "unstable"; }

std::string_view to_string(Reason r) {
    switch (r) {
        case Reason::Converged: return "converged";
        case Reason::Divergence: return "divergence";
        case Reason::SustainedOscillation: return "sustained_oscillation";
        case Reason::GrowingOscillation: return "growing_oscillation";
    }
    return "?";
}

namespace {

StabilityVerdict make(Reason r, double ratio, int half_cycles) {
    StabilityVerdict v;
    v.reason = r;
    v.outcome = r == Reason::Converged ? Outcome::Stable : Outcome::Unstable;
    v.growth_ratio = ratio;
    v.half_cycles = half_cycles;
    return v;
}

int severity(Reason r) {
    switch (r) {
        case Reason::Converged: return 0;
        case Reason::SustainedOscillation: return 1;
        case Reason::GrowingOscillation: return 2;
        case Reason::Divergence: return 3;
    }
    return 0;
}

}  // namespace

StabilityVerdict classify_signal(const std::vector<double>& x, const ClassifierOptions& opt, double floor) {
    const std::size_t n = x.size();
    if (n < opt.min_samples) {
        throw InvalidInput("trajectory too short for the stability classifier (" + std::to_string(n) + " samples)");
    }
    double peak_all = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) return make(Reason::Divergence, std::numeric_limits<double>::infinity(), 0);
        peak_all = std::max(peak_all, std::abs(v));
    }
    const double amp_floor = opt.floor_factor * std::max(1e-12 * peak_all, floor);

    const auto start = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - opt.tail_fraction)));
    const std::size_t last10 = n - std::max<std::size_t>(n / 10, 1);
    const double ref = std::accumulate(x.begin() + static_cast<std::ptrdiff_t>(last10), x.end(), 0.0) /
                       static_cast<double>(n - last10);

    // Half-cycle peaks between consecutive zero crossings of the detrended tail.
    std::vector<double> peaks;
    int sign = 0;
    double run_peak = 0.0;
    bool counting = false;
    for (std::size_t k = start; k < n; ++k) {
        const double y = x[k] - ref;
        const int s = (y > 0.0) - (y < 0.0);
        if (s == 0) continue;
        if (sign != 0 && s != sign) {
            if (counting) peaks.push_back(run_peak);
            counting = true;
            run_peak = 0.0;
        }
        sign = s;
        run_peak = std::max(run_peak, std::abs(y));
    }
    const int half_cycles = static_cast<int>(peaks.size());

    if (half_cycles >= 3) {
        const int m = half_cycles;
        int lag = std::min(2 * opt.window_cycles, m - 1);
        lag -= lag % 2;
        if (lag >= 2) {
            const double first = peaks[m - 1 - lag];
            const double last = peaks[m - 1];
            double ratio = first > 0.0 ? last / first : std::numeric_limits<double>::infinity();
            // Express the ratio over the full window even when fewer cycles are available.
            if (lag < 2 * opt.window_cycles && std::isfinite(ratio) && ratio > 0.0) {
                ratio = std::pow(ratio, 2.0 * opt.window_cycles / lag);
            }
            if (last > amp_floor) {
                if (ratio > opt.growth_threshold) return make(Reason::GrowingOscillation, ratio, half_cycles);
                if (ratio >= opt.decay_threshold) return make(Reason::SustainedOscillation, ratio, half_cycles);
            }
            return make(Reason::Converged, ratio, half_cycles);
        }
    }

    // Non-oscillatory tail: compare the rate of change at both ends of the tail.
    const std::size_t len = n - start;
    const std::size_t seg = std::max<std::size_t>(len / 5, 2);
    const auto mean_abs_diff = [&](std::size_t a, std::size_t b) {
        double acc = 0.0;
        for (std::size_t k = a + 1; k < b; ++k) acc += std::abs(x[k] - x[k - 1]);
        return acc / static_cast<double>(b - a - 1);
    };
    const double d_first = mean_abs_diff(start, start + seg);
    const double d_last = mean_abs_diff(n - seg, n);
    const double ratio = d_first > 0.0 ? d_last / d_first : (d_last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > opt.growth_threshold && d_last * static_cast<double>(seg) > amp_floor) {
        return make(Reason::Divergence, ratio, half_cycles);
    }
    return make(Reason::Converged, ratio, half_cycles);
}

StabilityVerdict classify_stability(const Trajectory& traj, const ClassifierOptions& opt) {
    if (traj.diverged) return make(Reason::Divergence, std::numeric_limits<double>::infinity(), 0);
    const double bound = opt.divergence_factor * traj.command_scale;
    for (double v : traj.theta_l) {
        if (!std::isfinite(v) || std::abs(v) > bound) {
            return make(Reason::Divergence, std::numeric_limits<double>::infinity(), 0);
        }
    }
    const StabilityVerdict a = classify_signal(traj.tau_s, opt, traj.noise_amplitude);
    const StabilityVerdict b = classify_signal(traj.theta_l, opt, 0.0);
    StabilityVerdict worst = severity(b.reason) > severity(a.reason) ? b : a;
    worst.growth_ratio = std::max(a.growth_ratio, b.growth_ratio);
    return worst;
}

}  // namespace seaz::sim
