#include "seaz/passivity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "seaz/error.hpp"

namespace seaz::passivity {

namespace {

struct AxisReport {
    int unstable = 0;
    int bad_axis = 0;
};

// Unstable and ill-formed imaginary-axis poles of g.
AxisReport pole_report(const RationalTF& g) {
    AxisReport r;
    const auto poles = g.poles();
    if (poles.empty()) return r;
    double largest = 1.0;
    for (const Complex& p : poles) largest = std::max(largest, std::abs(p));
    const double tol = 1e-9 * largest;
    const Polynomial dden = g.den().derivative();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const Complex p = poles[i];
        if (p.real() > tol) {
            ++r.unstable;
            continue;
        }
        if (p.real() < -tol) continue;
        bool repeated = false;
        for (std::size_t j = 0; j < poles.size(); ++j) {
            if (j != i && std::abs(poles[j] - p) <= 1e-6 * std::max(1.0, std::abs(p))) repeated = true;
        }
        if (repeated) {
            ++r.bad_axis;
            continue;
        }
        const Complex pa(0.0, p.imag());
        const Complex res = g.num()(pa) / dden(pa);
        if (!(res.real() >= -1e-9 * std::abs(res))) ++r.bad_axis;
    }
    return r;
}

struct MinResult {
    double value = std::numeric_limits<double>::infinity();
    double omega = 0.0;
    int singular = 0;
};

double golden_min(const std::function<double(double)>& f, double lo, double hi, double& arg) {
    // Minimize over u = log(omega).
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(lo);
    double b = std::log(hi);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(std::exp(c));
    double fd = f(std::exp(d));
    for (int it = 0; it < 60 && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(std::exp(d));
        }
    }
    if (fc < fd) {
        arg = std::exp(c);
        return fc;
    }
    arg = std::exp(d);
    return fd;
}

MinResult sweep_min(const std::function<double(double)>& f, const FrequencyGrid& grid, bool refine) {
    MinResult out;
    const auto& w = grid.points();
    std::vector<double> v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        v[i] = f(w[i]);
        if (!std::isfinite(v[i])) {
            ++out.singular;
            continue;
        }
        if (v[i] < out.value) {
            out.value = v[i];
            out.omega = w[i];
        }
    }
    if (!refine || w.size() < 3) return out;

    std::vector<std::size_t> minima;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        if (std::isfinite(v[i]) && v[i] <= v[i - 1] && v[i] <= v[i + 1]) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    if (minima.size() > 8) minima.resize(8);
    for (std::size_t i : minima) {
        double arg = w[i];
        const double val = golden_min(f, w[i - 1], w[i + 1], arg);
        if (std::isfinite(val) && val < out.value) {
            out.value = val;
            out.omega = arg;
        }
    }
    return out;
}

std::vector<double> natural_frequencies(const RationalTF& g) {
    std::vector<double> out;
    auto add = [&](const std::vector<Complex>& rs) {
        for (const Complex& r : rs) {
            if (std::abs(r) > 0.0) out.push_back(std::abs(r));
            if (std::abs(r.imag()) > 0.0) out.push_back(std::abs(r.imag()));
        }
    };
    add(g.poles());
    add(g.zeros());
    return out;
}

Complex eval(const Polynomial& p, double omega) { return p(Complex(0.0, omega)); }

}  // namespace

FrequencyGrid analysis_grid(const RationalTF& g, const SweepOptions& opt) {
    const FrequencyGrid base = FrequencyGrid::per_decade(opt.omega_lo, opt.omega_hi, opt.points_per_decade);
    const auto extra = natural_frequencies(g);
    return base.with_points(extra);
}

double default_tolerance(const model::PlantParams& p) { return 1e-9 * p.K; }

PassivityVerdict positive_real_margin(const RationalTF& z, const FrequencyGrid& grid, double tol, bool refine) {
    PassivityVerdict v;
    const AxisReport ax = pole_report(z);
    v.unstable_poles = ax.unstable;
    v.bad_axis_poles = ax.bad_axis;
    const auto f = [&](double w) {
        const Complex d = eval(z.den(), w);
        if (d == Complex(0.0, 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return (eval(z.num(), w) / d).real();
    };
    const MinResult m = sweep_min(f, grid, refine);
    v.min_real = m.value;
    v.argmin_omega = m.omega;
    v.singular_samples = m.singular;
    v.passive = v.unstable_poles == 0 && v.bad_axis_poles == 0 && m.value >= -tol;
    return v;
}

PassivityVerdict positive_real_margin(const RationalTF& z, double tol, const SweepOptions& opt) {
    return positive_real_margin(z, analysis_grid(z, opt), tol, opt.refine);
}

PassivityVerdict load_port_condition(const RationalTF& z_s, const model::PlantParams& p, LoadVariant variant,
                                     const FrequencyGrid& grid, double tol, bool refine) {
    const model::LoadPort lp = model::load_port(z_s, p);
    PassivityVerdict v;
    const AxisReport ay = pole_report(lp.Y_l);
    v.unstable_poles = ay.unstable;
    v.bad_axis_poles = ay.bad_axis;
    double offset = 0.0;
    if (variant == LoadVariant::DampingThreshold) {
        const AxisReport az = pole_report(lp.Z_l);
        v.unstable_poles += az.unstable;
        v.bad_axis_poles += az.bad_axis;
        offset = p.B_l;
    }
    // Re{Y} >= -tol |Y|^2 is the same as Re{1/Y} >= -tol; evaluate Z_l directly.
    const auto f = [&](double w) {
        const Complex d = eval(lp.Z_l.den(), w);
        if (d == Complex(0.0, 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return (eval(lp.Z_l.num(), w) / d).real() - offset;
    };
    const MinResult m = sweep_min(f, grid, refine);
    v.min_real = m.value;
    v.argmin_omega = m.omega;
    v.singular_samples = m.singular;
    v.passive = v.unstable_poles == 0 && v.bad_axis_poles == 0 && m.value >= -tol;
    return v;
}

PassivityVerdict load_port_condition(const RationalTF& z_s, const model::PlantParams& p, LoadVariant variant,
                                     double tol, const SweepOptions& opt) {
    const model::LoadPort lp = model::load_port(z_s, p);
    return load_port_condition(z_s, p, variant, analysis_grid(lp.Y_l, opt), tol, opt.refine);
}

double RezlCoefficients::evaluate(double omega) const {
    const double w2 = omega * omega;
    const double den = denominator(w2);
    if (den == 0.0) {
        throw SingularError("closed-form Re{Z_l} denominator vanishes at omega = " + std::to_string(omega));
    }
    return (c4 * w2 * w2 + c2 * w2 + c0) / den;
}

RezlCoefficients rezl_coefficients(const model::PlantParams& p, const model::ControllerGains& g) {
    const double K = p.K, N = p.N, Jm = p.J_m, Bm = p.B_m, Bl = p.B_l;
    const double Kp = g.K_p, Kd = g.K_d;
    const double b1 = Bm + K * N * Kd;      // damping term of the loop denominator
    const double k0 = K * N * (Kp + N);     // stiffness term of the loop denominator
    const double mid = b1 * b1 - 2.0 * Jm * k0;
    RezlCoefficients r;
    r.c4 = Bl * Jm;
    r.c2 = (Bl * mid + K * K * N * Jm * Kd) / Jm;
    r.c0 = (Bl * k0 * k0 + K * K * N * Bm * (Kp + N)) / Jm;
    r.denominator = Polynomial{k0 * k0 / Jm, mid / Jm, Jm};
    return r;
}

RezlCoefficients rezl_coefficients_printed(const model::PlantParams& p, const model::ControllerGains& g) {
    const double K = p.K, N = p.N, Jm = p.J_m, Bm = p.B_m, Bl = p.B_l;
    const double Kp = g.K_p, Kd = g.K_d;
    RezlCoefficients r;
    r.c4 = Bl * Jm;
    r.c2 = Bl * Bm + 2.0 * Bl * Bm * K * Kd * N + Jm * Kd * K * K * N - 2.0 * Bl * Jm * K * N * (Kp + 1.0) +
           Bl * Kd * Kd * K * K * N * N;
    r.c0 = K * K * N * (Bm * Kp + Bm * N + Bl * Kp * Kp * N) + K * K * N * (2.0 * Bl * Kp * N * N + Bl * N * N * N);
    // K N (J_m K_d w^2 - K K_d N^2 + B_m K_p)
    r.denominator = Polynomial{K * N * (-K * Kd * N * N + Bm * Kp), K * N * Jm * Kd};
    return r;
}

namespace {

double numeric_rezl(const model::PlantParams& p, const model::ControllerGains& g, double omega) {
    model::SeaConfig cfg;
    cfg.plant = p;
    cfg.nominal = model::NominalParams::matching(p);
    cfg.gains = g;
    cfg.arch = model::Architecture::NoDob;
    cfg.ff = model::FeedforwardKind::Zero;
    const auto port = model::spring_port(cfg);
    const auto lp = model::load_port(port.Z_s, p);
    return lp.Z_l.at_frequency(omega).real();
}

}  // namespace

RezlCoefficients rezl_coefficients_fit(const model::PlantParams& p, const model::ControllerGains& g,
                                       std::span<const double> omegas) {
    if (omegas.size() < 3) {
        throw InvalidInput("rezl fit needs at least 3 frequencies");
    }
    RezlCoefficients r = rezl_coefficients(p, g);
    const Eigen::Index n = static_cast<Eigen::Index>(omegas.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double w = omegas[k];
        const double w2 = w * w;
        const double target = numeric_rezl(p, g, w) * r.denominator(w2);
        const double scale = 1.0 / std::max(std::abs(target), std::numeric_limits<double>::min());
        A(k, 0) = w2 * w2 * scale;
        A(k, 1) = w2 * scale;
        A(k, 2) = scale;
        y(k) = target * scale;
    }
    // Column equilibration keeps the normal scales of w^4 and 1 comparable.
    Eigen::Vector3d colscale;
    for (int j = 0; j < 3; ++j) {
        colscale(j) = A.col(j).norm();
        if (colscale(j) == 0.0) colscale(j) = 1.0;
        A.col(j) /= colscale(j);
    }
    const Eigen::Vector3d x = A.colPivHouseholderQr().solve(y).cwiseQuotient(colscale);
    r.c4 = x(0);
    r.c2 = x(1);
    r.c0 = x(2);
    return r;
}

RezlEvaluation rezl_closed_form_no_dob(const model::PlantParams& p, const model::ControllerGains& g, double omega) {
    RezlEvaluation e;
    e.closed_form = rezl_coefficients(p, g).evaluate(omega);
    const RezlCoefficients printed = rezl_coefficients_printed(p, g);
    const double den = printed.denominator(omega * omega);
    e.printed = den == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                           : (printed.c4 * std::pow(omega, 4) + printed.c2 * omega * omega + printed.c0) / den;
    e.numeric = numeric_rezl(p, g, omega);
    return e;
}

EnergyLedger passivity_observer(std::span<const double> torque, std::span<const double> velocity, double dt,
                                double tol_energy, double sign) {
    if (torque.size() != velocity.size()) {
        throw InvalidInput("passivity_observer: torque and velocity lengths differ");
    }
    if (!(dt > 0.0)) {
        throw InvalidInput("passivity_observer: dt must be > 0");
    }
    EnergyLedger led;
    led.time.resize(torque.size());
    led.energy.resize(torque.size());
    double acc = 0.0;
    double peak = 0.0;
    for (std::size_t k = 0; k < torque.size(); ++k) {
        acc += torque[k] * velocity[k];
        led.time[k] = dt * static_cast<double>(k);
        led.energy[k] = sign * dt * acc;
        peak = std::max(peak, std::abs(led.energy[k]));
    }
    led.min_energy = led.energy.empty() ? 0.0 : *std::min_element(led.energy.begin(), led.energy.end());
    led.tol_energy = tol_energy >= 0.0 ? tol_energy : 1e-6 * peak;
    led.violation = led.min_energy < -led.tol_energy;
    return led;
}

}  // namespace seaz::passivity
