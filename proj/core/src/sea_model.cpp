#include "seaz/sea_model.hpp"

#include <cmath>

#include "seaz/error.hpp"

namespace seaz::model {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

void PlantParams::validate() const {
    require(finite_all({J_m, B_m, J_l, B_l, K, N}), "plant parameters must be finite");
    require(J_m > 0.0, "plant.J_m must be > 0");
    require(J_l > 0.0, "plant.J_l must be > 0");
    require(K > 0.0, "plant.K must be > 0");
    require(N > 0.0, "plant.N must be > 0");
    require(B_m >= 0.0, "plant.B_m must be >= 0");
    require(B_l >= 0.0, "plant.B_l must be >= 0");
}

void NominalParams::validate() const {
    require(finite_all({J_m_hat, B_m_hat}), "nominal parameters must be finite");
    require(J_m_hat > 0.0, "nominal.J_m_hat must be > 0");
    require(B_m_hat > 0.0, "nominal.B_m_hat must be > 0");
}

void ControllerGains::validate() const {
    require(finite_all({K_p, K_d}), "gains must be finite");
    require(K_p >= 0.0, "gains.K_p must be >= 0");
    require(K_d >= 0.0, "gains.K_d must be >= 0");
}

void ImpedanceParams::validate() const {
    require(finite_all({K_imp, B_imp}), "impedance parameters must be finite");
    require(K_imp >= 0.0, "impedance.K_imp must be >= 0");
    require(B_imp >= 0.0, "impedance.B_imp must be >= 0");
}

void QFilterSpec::validate() const {
    require(finite_all({omega, zeta}), "Q filter parameters must be finite");
    require(omega > 0.0, "q_filter.omega_dob must be > 0");
    require(zeta > 0.0, "q_filter.zeta must be > 0");
    if (q0) require(*q0 > 0.0 && *q0 <= 1.0, "q_filter.q0 must lie in (0, 1]");
}

double SeaConfig::q0() const {
    if (q.q0) return *q.q0;
    return ff == FeedforwardKind::Proposed ? 0.99 : 1.0;
}

void SeaConfig::validate() const {
    plant.validate();
    nominal.validate();
    gains.validate();
    imp.validate();
    q.validate();
    require(std::isfinite(d_const), "d_const must be finite");
    if (ff == FeedforwardKind::Proposed && arch == Architecture::NoDob) {
        throw ConfigError("proposed feedforward is only defined for dobm and dobt");
    }
}

std::string_view to_string(Architecture a) {
    switch (a) {
        case Architecture::NoDob: return "nodob";
        case Architecture::Dobm: return "dobm";
        case Architecture::Dobt: return "dobt";
    }
    return "?";
}

std::string_view to_string(FeedforwardKind f) {
    switch (f) {
        case FeedforwardKind::Zero: return "zero";
        case FeedforwardKind::Original: return "original";
        case FeedforwardKind::Proposed: return "proposed";
    }
    return "?";
}

Architecture parse_architecture(std::string_view s) {
    if (s == "nodob") return Architecture::NoDob;
    if (s == "dobm") return Architecture::Dobm;
    if (s == "dobt") return Architecture::Dobt;
    throw ConfigError("unknown architecture '" + std::string(s) + "' (expected nodob, dobm or dobt)");
}

FeedforwardKind parse_feedforward(std::string_view s) {
    if (s == "zero") return FeedforwardKind::Zero;
    if (s == "original") return FeedforwardKind::Original;
    if (s == "proposed") return FeedforwardKind::Proposed;
    throw ConfigError("unknown feedforward '" + std::string(s) + "' (expected zero, original or proposed)");
}

PlantTFs plant_tfs(const PlantParams& p) {
    return {RationalTF(Polynomial::constant(1.0), Polynomial{p.B_m, p.J_m}),
            RationalTF(Polynomial::constant(1.0), Polynomial{p.B_l, p.J_l})};
}

RationalTF q_filter(double omega, double zeta, double q0) {
    const double w2 = omega * omega;
    return {Polynomial::constant(q0 * w2), Polynomial{w2, 2.0 * zeta * omega, 1.0}};
}

RationalTF q_filter(const QFilterSpec& spec) { return q_filter(spec.omega, spec.zeta, spec.q0.value_or(1.0)); }

RationalTF controller_tf(const ControllerGains& g) { return {Polynomial{g.K_p, g.K_d}, Polynomial::constant(1.0)}; }

RationalTF impedance_tf(const ImpedanceParams& i) {
    return {Polynomial{i.K_imp, i.B_imp}, Polynomial::s()};
}

NominalPlants nominal_plants(const NominalParams& n, const PlantParams& p) {
    const RationalTF m_hat(Polynomial::constant(1.0), Polynomial{n.B_m_hat, n.J_m_hat});
    const RationalTF forward = RationalTF(p.K * p.N) * RationalTF::integrator() * m_hat;
    return {m_hat, lti::tf_feedback(forward, RationalTF(p.N))};
}

RationalTF p_t_without_gear(const NominalParams& n, const PlantParams& p) {
    const RationalTF m_hat(Polynomial::constant(1.0), Polynomial{n.B_m_hat, n.J_m_hat});
    return lti::tf_feedback(m_hat, RationalTF(p.K) * RationalTF::integrator());
}

RationalTF effective_motor(const RationalTF& m, const RationalTF& m_hat, const RationalTF& q) {
    // M Mhat / ((1-Q) Mhat + Q M) with every block written as num/den.
    const Polynomial& mn = m.num();
    const Polynomial& md = m.den();
    const Polynomial& hn = m_hat.num();
    const Polynomial& hd = m_hat.den();
    const Polynomial& qn = q.num();
    const Polynomial& qd = q.den();
    return {mn * hn * qd, (qd - qn) * hn * md + qn * mn * hd};
}

RationalTF feedforward_tf(FeedforwardKind kind, Architecture arch, const RationalTF& q, const RationalTF& p_t,
                          double N) {
    if (kind == FeedforwardKind::Zero) return RationalTF(0.0);
    const RationalTF one_minus_q(q.den() - q.num(), q.den());
    const RationalTF q_pt_inv(q.num() * p_t.den(), q.den() * p_t.num());
    if (kind == FeedforwardKind::Original) {
        return arch == Architecture::Dobt ? q_pt_inv : RationalTF(0.0);
    }
    switch (arch) {
        case Architecture::NoDob:
            throw ConfigError("proposed feedforward is not defined for the nodob architecture");
        case Architecture::Dobm:
            return RationalTF(N) * one_minus_q;
        case Architecture::Dobt:
            // Shared denominator q.den * p_t.num keeps the degree minimal.
            return {q.num() * p_t.den() + N * ((q.den() - q.num()) * p_t.num()), q.den() * p_t.num()};
    }
    throw ConfigError("unknown architecture");
}

Blocks build_blocks(const SeaConfig& cfg) {
    cfg.validate();
    Blocks b;
    const PlantTFs pl = plant_tfs(cfg.plant);
    const NominalPlants np = nominal_plants(cfg.nominal, cfg.plant);
    b.M = pl.M;
    b.L = pl.L;
    b.M_hat = np.P_m;
    b.P_t = np.P_t;
    b.P_t_inv = np.P_t.inverse();
    b.Q = q_filter(cfg.q.omega, cfg.q.zeta, cfg.q0());
    b.M_tilde = effective_motor(b.M, b.M_hat, b.Q);
    b.C = controller_tf(cfg.gains);
    b.C_ff = feedforward_tf(cfg.ff, cfg.arch, b.Q, b.P_t, cfg.plant.N);
    b.I = impedance_tf(cfg.imp);
    return b;
}

PortDynamics spring_port(const SeaConfig& cfg) { return spring_port(cfg, build_blocks(cfg)); }

PortDynamics spring_port(const SeaConfig& cfg, const Blocks& b) {
    const PlantParams& p = cfg.plant;
    const double K = p.K;
    const double N = p.N;

    // Every row is cleared of inner denominators by multiplying through with
    // s^2 * m * f_d (and q_d where Q appears), m = J_m s + B_m.
    const Polynomial s = Polynomial::s();
    const Polynomial m{p.B_m, p.J_m};
    const Polynomial mh{cfg.nominal.B_m_hat, cfg.nominal.J_m_hat};
    const Polynomial c = b.C.num();
    const Polynomial i{cfg.imp.K_imp, cfg.imp.B_imp};
    const Polynomial fn = b.C_ff.num();
    const Polynomial fd = b.C_ff.den();
    const Polynomial qn = b.Q.num();
    const Polynomial qd = b.Q.den();
    const Polynomial cf = c * fd + fn;  // (C + C_ff) * f_d
    const Polynomial Np = Polynomial::constant(N);

    Polynomial zn, zd, dn, dd;
    switch (cfg.arch) {
        case Architecture::NoDob: {
            const Polynomial loop = s * m + K * N * (c + Np);
            zn = K * (N * (cf * i) + s * m * fd);
            zd = s * fd * loop;
            dn = Polynomial::constant(K * N);
            dd = loop;
            break;
        }
        case Architecture::Dobm: {
            // Mtilde = q_d / mt
            const Polynomial mt = (qd - qn) * m + qn * mh;
            const Polynomial loop = s * mt + K * N * (c * qd + N * (qd - qn));
            zn = K * (N * (qd * cf * i) + s * mt * fd);
            zd = s * fd * loop;
            dn = K * N * (qd - qn);
            dd = loop;
            break;
        }
        case Architecture::Dobt: {
            // P_t^-1 = pti / (K N) with pti = s mh + N^2 K
            const Polynomial pti = s * mh + Polynomial::constant(N * N * K);
            const Polynomial h = (K * N) * (c * qd) + (K * N * N) * (qd - qn) + qn * pti;
            const Polynomial loop = (qd - qn) * s * m + h;
            zn = K * (N * (qd * cf * i) + s * m * fd * (qd - qn));
            zd = s * fd * loop;
            dn = K * N * (qd - qn);
            dd = loop;
            break;
        }
    }
    if (zd.is_zero() || dd.is_zero()) {
        throw ConfigError("spring port denominator is identically zero");
    }
    return {RationalTF(zn, zd), RationalTF(dn, dd), cfg.arch};
}

LoadPort load_port(const RationalTF& z_s, const PlantParams& p) {
    const Polynomial l{p.B_l, p.J_l};
    const Polynomial zl_num = z_s.num() + l * z_s.den();
    if (zl_num.is_zero()) {
        throw SingularError("load port admittance is singular");
    }
    return {RationalTF(z_s.den(), zl_num), RationalTF(zl_num, z_s.den())};
}

}  // namespace seaz::model
