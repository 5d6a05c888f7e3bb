#include "seaz/metrics.hpp"

#include <cmath>
#include <sstream>

#include "seaz/error.hpp"

namespace seaz::metrics {

using lti::Complex;
using lti::RationalTF;

ImpedanceParams ZRegionConfig::upper(const model::PlantParams& p) const {
    return I_upper.value_or(ImpedanceParams{p.K, 0.0});
}

void ZRegionConfig::validate() const {
    if (!(omega1 > 0.0)) throw ConfigError("zregion.omega1 must be > 0");
    if (!(eps_tail > 0.0)) throw ConfigError("zregion.eps_tail must be > 0");
    if (!(rel_tol > 0.0)) throw ConfigError("zregion.rel_tol must be > 0");
    if (!(omega_limit > omega1)) throw ConfigError("zregion.omega_limit must exceed omega1");
    if (I_upper) I_upper->validate();
}

namespace {

// Integrand sampler with the blocks built once.
class ZIntegrand {
public:
    ZIntegrand(const SeaConfig& cfg, const ImpedanceParams& iu)
        : b_(model::build_blocks(cfg)), arch_(cfg.arch), N_(cfg.plant.N), iu_(model::impedance_tf(iu)) {}

    double operator()(double omega) const {
        const Complex s(0.0, omega);
        Complex motor;
        switch (arch_) {
            case Architecture::NoDob: motor = b_.M(s); break;
            case Architecture::Dobm: motor = b_.M_tilde(s); break;
            case Architecture::Dobt: motor = b_.M(s) / (1.0 - b_.Q(s)); break;
        }
        return std::abs(std::log(std::abs(N_ * motor * (b_.C(s) + b_.C_ff(s)) * iu_(s) + 1.0)));
    }

private:
    model::Blocks b_;
    Architecture arch_;
    double N_;
    RationalTF iu_;
};

}  // namespace

double z_region_integrand(const SeaConfig& cfg, const ImpedanceParams& I_u, double omega) {
    return ZIntegrand(cfg, I_u)(omega);
}

double z_region_integrand_from_ports(const SeaConfig& cfg, const ImpedanceParams& I_u, double omega) {
    SeaConfig up = cfg;
    up.imp = I_u;
    SeaConfig low = cfg;
    low.imp = ImpedanceParams{0.0, 0.0};
    const Complex zu = model::spring_port(up).Z_s.at_frequency(omega);
    const Complex zl = model::spring_port(low).Z_s.at_frequency(omega);
    return std::abs(std::log(std::abs(zu / zl)));
}

ZRegionResult z_region(const SeaConfig& cfg, const ZRegionConfig& zcfg) {
    zcfg.validate();
    const ImpedanceParams iu = zcfg.upper(cfg.plant);
    const ZIntegrand f(cfg, iu);

    // Locate omega2: the integrand stays below eps_tail from there on.
    constexpr int per_decade = 40;
    const double decades = std::log10(zcfg.omega_limit / zcfg.omega1);
    const int n_scan = static_cast<int>(std::ceil(decades * per_decade));
    int last_above = -1;
    double last_value = 0.0;
    for (int k = 0; k <= n_scan; ++k) {
        const double w = zcfg.omega1 * std::pow(10.0, static_cast<double>(k) / per_decade);
        last_value = f(w);
        if (!std::isfinite(last_value)) {
            throw NumericalError("z-region integrand is not finite at omega = " + std::to_string(w));
        }
        if (last_value >= zcfg.eps_tail) last_above = k;
    }
    if (last_above == n_scan) {
        std::ostringstream os;
        os << "z-region integrand does not decay below eps_tail=" << zcfg.eps_tail << " by omega="
           << zcfg.omega_limit << " (value there " << last_value << ")";
        throw NumericalError(os.str());
    }
    ZRegionResult out;
    if (last_above < 0) {
        out.omega2 = zcfg.omega1;
        return out;
    }
    out.omega2 = zcfg.omega1 * std::pow(10.0, static_cast<double>(last_above + 1) / per_decade);

    // Trapezoid in u = ln(omega) of f(omega) * omega, halving the step.
    const double a = std::log(zcfg.omega1);
    const double b = std::log(out.omega2);
    const auto g = [&](double u) {
        const double w = std::exp(u);
        return f(w) * w;
    };
    std::size_t n = 64;
    double h = (b - a) / static_cast<double>(n);
    double sum_ends = 0.5 * (g(a) + g(b));
    double sum_inner = 0.0;
    for (std::size_t k = 1; k < n; ++k) sum_inner += g(a + h * static_cast<double>(k));
    double t = h * (sum_ends + sum_inner);
    constexpr std::size_t max_intervals = std::size_t{1} << 22;
    for (;;) {
        double mid = 0.0;
        for (std::size_t k = 0; k < n; ++k) mid += g(a + h * (static_cast<double>(k) + 0.5));
        sum_inner += mid;
        n *= 2;
        h *= 0.5;
        const double t2 = h * (sum_ends + sum_inner);
        const bool converged = std::abs(t2 - t) <= zcfg.rel_tol * std::abs(t2);
        t = t2;
        if (converged) break;
        if (n >= max_intervals) {
            throw NumericalError("z-region quadrature did not converge");
        }
    }
    out.value = t;
    out.intervals = n;
    const std::size_t samples = std::min<std::size_t>(n, 2000);
    out.integrand.reserve(samples + 1);
    for (std::size_t k = 0; k <= samples; ++k) {
        const double w = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(samples));
        out.integrand.emplace_back(w, f(w));
    }
    return out;
}

DcStiffness dc_rendered_stiffness(const SeaConfig& cfg) {
    const model::Blocks b = model::build_blocks(cfg);
    const double N = cfg.plant.N;
    const double q0 = cfg.q0();
    const double kp = cfg.gains.K_p;
    if (b.C_ff.den()(0.0) == 0.0) {
        throw ConfigError("feedforward has a pole at s = 0; DC stiffness undefined");
    }
    const double cff0 = b.C_ff.num()(0.0) / b.C_ff.den()(0.0);
    double den = 0.0;
    double dist = 0.0;
    switch (cfg.arch) {
        case Architecture::NoDob:
            den = kp + N;
            dist = 1.0;
            break;
        case Architecture::Dobm:
            den = kp + N * (1.0 - q0);
            dist = 1.0 - q0;
            break;
        case Architecture::Dobt:
            // P_t^-1(0) = N
            den = kp + N * (1.0 - q0) + q0 * N;
            dist = 1.0 - q0;
            break;
    }
    if (den == 0.0) {
        throw ConfigError("DC rendered stiffness is singular (K_p + DC loop gain = 0)");
    }
    DcStiffness r;
    r.formula = (kp + cff0) * cfg.imp.K_imp / den;
    r.disturbance_gain = dist / den;
    const auto port = model::spring_port(cfg);
    const Complex jw(0.0, r.probe_omega);
    r.low_frequency = std::abs(jw * port.Z_s(jw));
    const double scale = std::max(std::abs(r.formula), 1e-6 * cfg.plant.K);
    r.rel_diff = std::abs(r.low_frequency - r.formula) / scale;
    r.consistent = r.rel_diff <= 1e-3;
    return r;
}

std::string_view to_string(Condition c) {
    switch (c) {
        case Condition::Spring: return "spring";
        case Condition::LoadStrict: return "load-strict";
        case Condition::LoadThreshold: return "load-threshold";
    }
    return "?";
}

Condition parse_condition(std::string_view s) {
    if (s == "spring") return Condition::Spring;
    if (s == "load-strict" || s == "load_strict" || s == "load") return Condition::LoadStrict;
    if (s == "load-threshold" || s == "load_threshold") return Condition::LoadThreshold;
    throw ConfigError("unknown condition '" + std::string(s) + "' (expected spring, load-strict or load-threshold)");
}

passivity::PassivityVerdict evaluate_condition(const SeaConfig& cfg, Condition c, const StiffnessOptions& opt) {
    const double tol = opt.margin_tol >= 0.0 ? opt.margin_tol : passivity::default_tolerance(cfg.plant);
    const auto port = model::spring_port(cfg);
    switch (c) {
        case Condition::Spring:
            return passivity::positive_real_margin(port.Z_s, tol, opt.sweep);
        case Condition::LoadStrict:
            return passivity::load_port_condition(port.Z_s, cfg.plant, passivity::LoadVariant::StrictAdmittance, tol,
                                                  opt.sweep);
        case Condition::LoadThreshold:
            return passivity::load_port_condition(port.Z_s, cfg.plant, passivity::LoadVariant::DampingThreshold, tol,
                                                  opt.sweep);
    }
    throw ConfigError("unknown condition");
}

StiffnessResult max_safe_stiffness(const SeaConfig& cfg_base, Condition c, const StiffnessOptions& opt) {
    cfg_base.validate();
    const double K = cfg_base.plant.K;
    StiffnessResult r;
    r.condition = c;
    r.tol_k = opt.tol_k > 0.0 ? opt.tol_k : 1e-3 * K;

    const auto passes = [&](double k) {
        SeaConfig cfg = cfg_base;
        cfg.imp.K_imp = k;
        ++r.evaluations;
        return evaluate_condition(cfg, c, opt).passive;
    };

    if (!passes(0.0)) {
        throw UnsafeBaseline(std::string("condition ") + std::string(to_string(c)) +
                          " fails at K_imp = 0; zero-impedance control is not safe for this configuration");
    }
    double lo = 0.0;
    double hi = 2.0 * K;
    while (passes(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > opt.cap_factor * K) {
            throw ConfigError("condition still holds at K_imp = " + std::to_string(lo) + "; stiffness unbounded");
        }
    }
    while (hi - lo > r.tol_k) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r.k_max = lo;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.k_max_normalized = lo / K;

    if (opt.post_check_points > 0) {
        std::ostringstream failed;
        bool bad = false;
        for (int j = 1; j <= opt.post_check_points; ++j) {
            const double k = lo * static_cast<double>(j) / static_cast<double>(opt.post_check_points);
            if (!passes(k)) {
                bad = true;
                failed << ' ' << k;
            }
        }
        if (bad) {
            throw NumericalError("non-monotone verdict below k_max = " + std::to_string(lo) +
                                 "; failing K_imp:" + failed.str());
        }
    }
    return r;
}

std::size_t SweepGrid::row_count() const {
    const auto len = [](std::size_t n) { return std::max<std::size_t>(n, 1); };
    return len(K_p.size()) * len(K_d.size()) * len(omega_dob.size()) * len(K_imp.size()) * len(B_imp.size()) *
           len(arch.size()) * len(ff.size());
}

std::vector<SeaConfig> SweepGrid::rows() const {
    const auto axis = [](const std::vector<double>& v, double base) {
        return v.empty() ? std::vector<double>{base} : v;
    };
    const auto kp = axis(K_p, base.gains.K_p);
    const auto kd = axis(K_d, base.gains.K_d);
    const auto wq = axis(omega_dob, base.q.omega);
    const auto ki = axis(K_imp, base.imp.K_imp);
    const auto bi = axis(B_imp, base.imp.B_imp);
    const auto ar = arch.empty() ? std::vector<Architecture>{base.arch} : arch;
    const auto fs = ff.empty() ? std::vector<FeedforwardKind>{base.ff} : ff;
    std::vector<SeaConfig> out;
    out.reserve(row_count());
    for (double a : kp)
        for (double b : kd)
            for (double c : wq)
                for (double d : ki)
                    for (double e : bi)
                        for (Architecture g : ar)
                            for (FeedforwardKind h : fs) {
                                SeaConfig cfg = base;
                                cfg.gains.K_p = a;
                                cfg.gains.K_d = b;
                                cfg.q.omega = c;
                                cfg.imp.K_imp = d;
                                cfg.imp.B_imp = e;
                                cfg.arch = g;
                                cfg.ff = h;
                                out.push_back(cfg);
                            }
    return out;
}

std::vector<SweepRow> param_sweep(const SweepGrid& grid, SweepTask task, const SweepOptions& opt) {
    const auto cfgs = grid.rows();
    std::vector<SweepRow> rows(cfgs.size());
    parallel_for(cfgs.size(), opt.threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.cfg = cfgs[i];
        try {
            switch (task) {
                case SweepTask::MaxStiff: {
                    row.stiffness = max_safe_stiffness(row.cfg, opt.condition, opt.stiffness);
                    row.value = row.stiffness->k_max_normalized;
                    break;
                }
                case SweepTask::ZRegion:
                    row.value = z_region(row.cfg, opt.zregion).value;
                    break;
                case SweepTask::DcStiffness:
                    row.value = dc_rendered_stiffness(row.cfg).formula;
                    break;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace seaz::metrics
