#include "seaz/error.hpp"
#include "seaz/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seaz::lti {

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : points_(std::move(omegas)) {
    if (points_.size() < 2) {
        throw InvalidInput("frequency grid needs at least 2 points");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i] > 0.0) || !std::isfinite(points_[i])) {
            throw InvalidInput("frequency grid points must be finite and > 0");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw InvalidInput("frequency grid must be strictly increasing");
        }
    }
}

FrequencyGrid FrequencyGrid::log_spaced(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw InvalidInput("log_spaced needs 0 < lo < hi and at least 2 points");
    }
    std::vector<double> w(points);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i) {
        w[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    w.front() = lo;
    w.back() = hi;
    return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::per_decade(double lo, double hi, std::size_t points_per_decade) {
    if (!(lo > 0.0) || !(hi > lo)) {
        throw InvalidInput("per_decade needs 0 < lo < hi");
    }
    const double decades = std::log10(hi / lo);
    const auto n = static_cast<std::size_t>(std::ceil(decades * static_cast<double>(points_per_decade))) + 1;
    return log_spaced(lo, hi, std::max<std::size_t>(n, 2));
}

FrequencyGrid FrequencyGrid::with_points(std::span<const double> extra) const {
    std::vector<double> w = points_;
    for (double x : extra) {
        if (std::isfinite(x) && x > front() && x < back()) w.push_back(x);
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return FrequencyGrid(std::move(w));
}

std::vector<FrequencySample> freq_response(const RationalTF& g, const FrequencyGrid& grid) {
    std::vector<FrequencySample> out;
    out.reserve(grid.size());
    for (double w : grid.points()) {
        const Complex s(0.0, w);
        const Complex d = g.den()(s);
        FrequencySample sample;
        sample.omega = w;
        if (d == Complex(0.0, 0.0)) {
            sample.singular = true;
            sample.value = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
        } else {
            sample.value = g.num()(s) / d;
            sample.singular = !std::isfinite(sample.value.real()) || !std::isfinite(sample.value.imag());
        }
        out.push_back(sample);
    }
    return out;
}

Stability classify_poles(std::span<const Complex> poles, double tol) {
    if (tol < 0.0) {
        double largest = 1.0;
        for (const Complex& p : poles) largest = std::max(largest, std::abs(p));
        tol = 1e-9 * largest;
    }
    bool marginal = false;
    for (const Complex& p : poles) {
        if (p.real() > tol) return Stability::Unstable;
        if (p.real() >= -tol) marginal = true;
    }
    return marginal ? Stability::Marginal : Stability::Stable;
}

Stability is_stable(const RationalTF& g, double tol) {
    const auto p = g.poles();
    return classify_poles(p, tol);
}

}  // namespace seaz::lti
