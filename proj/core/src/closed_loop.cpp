#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "seaz/error.hpp"
#include "seaz/simulate.hpp"

namespace seaz::sim {

using lti::Complex;
using lti::Polynomial;
using lti::RationalTF;

void EnvironmentModel::validate() const {
    if (!(K_e >= 0.0) || !(B_e >= 0.0) || !(m_e >= 0.0) || !(gap >= 0.0)) {
        throw ConfigError("environment K_e, B_e, m_e and gap must be >= 0");
    }
    if (contact == Contact::Bilateral && gap != 0.0) {
        throw ConfigError("bilateral environment requires gap = 0");
    }
    if (contact == Contact::Unilateral && m_e != 0.0) {
        throw ConfigError("environment mass is only supported for bilateral contact");
    }
}

std::vector<EnvironmentModel> default_environments(const model::PlantParams& p) {
    std::vector<EnvironmentModel> out;
    for (double f : {10.0, 100.0}) {
        EnvironmentModel e;
        e.K_e = f * p.K;
        e.B_e = 0.01 * e.K_e;
        out.push_back(e);
    }
    return out;
}

std::string_view to_string(Solver s) { return s == Solver::RK4 ? "rk4" : "exact"; }

Solver parse_solver(std::string_view s) {
    if (s == "rk4") return Solver::RK4;
    if (s == "exact") return Solver::Exact;
    throw ConfigError("unknown solver '" + std::string(s) + "' (expected rk4 or exact)");
}

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("sim.dt must be > 0");
    if (!(duration >= 10.0 * dt)) throw ConfigError("sim.duration must be at least 10 dt");
    if (!(filter_cutoff() > 0.0)) throw ConfigError("sim.derivative_filter_cutoff must be > 0");
    if (!(noise_amplitude >= 0.0)) throw ConfigError("sim.noise_amplitude must be >= 0");
    if (!(coulomb >= 0.0)) throw ConfigError("sim.coulomb must be >= 0");
    if (!(divergence_factor > 0.0)) throw ConfigError("sim.divergence_factor must be > 0");
}

namespace {

// Realizes g, adding first-order rolloff at wf for each excess zero.
lti::StateSpace realize(const RationalTF& g, double wf) {
    RationalTF h = g;
    while (!h.is_proper()) {
        h = h * RationalTF(Polynomial::constant(wf), Polynomial{wf, 1.0});
    }
    return lti::tf_to_state_space(h);
}

}  // namespace

ClosedLoop::ClosedLoop(const SeaConfig& cfg, const EnvironmentModel& env, const SimConfig& sim)
    : cfg_(cfg), env_(env), sim_(sim) {
    cfg_.validate();
    env_.validate();
    sim_.validate();
    if (cfg_.q.omega * sim_.dt > 0.5) {
        throw ConfigError("dt too coarse for the Q filter: omega_dob * dt = " +
                          std::to_string(cfg_.q.omega * sim_.dt) + " > 0.5");
    }
    blocks_ = model::build_blocks(cfg_);
    const double wf = sim_.filter_cutoff();

    ff_ss_ = realize(blocks_.C_ff, wf);
    if (cfg_.arch == model::Architecture::Dobm) {
        dob_a_ss_ = realize(blocks_.Q, wf);
        dob_b_ss_ = realize(blocks_.Q * blocks_.M_hat.inverse(), wf);
    } else if (cfg_.arch == model::Architecture::Dobt) {
        dob_a_ss_ = realize(blocks_.Q, wf);
        dob_b_ss_ = realize(blocks_.Q * blocks_.P_t_inv, wf);
    }
    if ((dob_a_ss_.D.size() && dob_a_ss_.D(0, 0) != 0.0)) {
        throw ConfigError("Q filter must be strictly proper");
    }

    lay_.n_ff = static_cast<int>(ff_ss_.states());
    lay_.ff = 6;
    lay_.dob_a = lay_.ff + lay_.n_ff;
    lay_.n_dob_a = static_cast<int>(dob_a_ss_.A.rows());
    lay_.dob_b = lay_.dob_a + lay_.n_dob_a;
    lay_.n_dob_b = static_cast<int>(dob_b_ss_.A.rows());
    lay_.n = lay_.dob_b + lay_.n_dob_b;

    contact_ = assemble(true);
    discretize(contact_);
    if (env_.contact == Contact::Unilateral) {
        free_ = assemble(false);
        discretize(free_);
    } else {
        free_ = contact_;
    }
}

ModeSystem ClosedLoop::assemble(bool contact) const {
    const StateLayout& L = lay_;
    const int n = L.n;
    const int nz = n + kInputs;
    using Row = Eigen::RowVectorXd;
    const auto unit = [&](int i) {
        Row r = Row::Zero(nz);
        r(i) = 1.0;
        return r;
    };
    const auto in = [&](int j) { return unit(n + j); };

    const model::PlantParams& p = cfg_.plant;
    const double wf = sim_.filter_cutoff();

    const Row tsm = unit(L.tau_s) + in(kNoise);
    const Row tref = cfg_.imp.K_imp * (unit(L.theta_l) - in(kThetaD)) + cfg_.imp.B_imp * unit(L.omega_l);
    const Row e = tref - tsm;
    const Row deriv_out = cfg_.gains.K_d * wf * (e - unit(L.deriv));

    Row y_ff = Row::Zero(nz);
    for (int k = 0; k < L.n_ff; ++k) y_ff += ff_ss_.C(0, k) * unit(L.ff + k);
    if (ff_ss_.D.size()) y_ff += ff_ss_.D(0, 0) * tref;

    const Row u_c = cfg_.gains.K_p * e + deriv_out + y_ff;

    Row u = u_c;
    Row dob_b_in = Row::Zero(nz);
    if (cfg_.arch != model::Architecture::NoDob) {
        Row dhat = Row::Zero(nz);
        for (int k = 0; k < L.n_dob_b; ++k) dhat += dob_b_ss_.C(0, k) * unit(L.dob_b + k);
        for (int k = 0; k < L.n_dob_a; ++k) dhat -= dob_a_ss_.C(0, k) * unit(L.dob_a + k);
        if (dob_b_ss_.D.size()) {
            // Feedthrough of the measurement path enters u directly.
            const Row meas = cfg_.arch == model::Architecture::Dobm ? unit(L.omega_m) : tsm;
            dhat += dob_b_ss_.D(0, 0) * meas;
        }
        u = u_c - dhat;
        dob_b_in = cfg_.arch == model::Architecture::Dobm ? unit(L.omega_m) : tsm;
    }

    Eigen::MatrixXd Mx = Eigen::MatrixXd::Zero(n, nz);
    Mx.row(L.theta_m) = unit(L.omega_m);
    Mx.row(L.omega_m) = (u - p.N * unit(L.tau_s) + in(kDist) - p.B_m * unit(L.omega_m)) / p.J_m;
    Mx.row(L.tau_s) = p.K * (unit(L.omega_l) + p.N * unit(L.omega_m));

    Row acc;
    Row tau_e = Row::Zero(nz);
    if (contact) {
        const Row spring_env = env_.K_e * (unit(L.theta_l) - env_.gap * in(kOne));
        acc = (-unit(L.tau_s) - (p.B_l + env_.B_e) * unit(L.omega_l) - spring_env) / (p.J_l + env_.m_e);
        tau_e = -(env_.m_e * acc + env_.B_e * unit(L.omega_l) + spring_env);
    } else {
        acc = (-unit(L.tau_s) - p.B_l * unit(L.omega_l)) / p.J_l;
    }
    Mx.row(L.omega_l) = acc;
    Mx.row(L.theta_l) = unit(L.omega_l);
    Mx.row(L.deriv) = wf * (e - unit(L.deriv));

    for (int k = 0; k < L.n_ff; ++k) {
        Row r = ff_ss_.B(k, 0) * tref;
        for (int j = 0; j < L.n_ff; ++j) r += ff_ss_.A(k, j) * unit(L.ff + j);
        Mx.row(L.ff + k) = r;
    }
    for (int k = 0; k < L.n_dob_a; ++k) {
        Row r = dob_a_ss_.B(k, 0) * u;
        for (int j = 0; j < L.n_dob_a; ++j) r += dob_a_ss_.A(k, j) * unit(L.dob_a + j);
        Mx.row(L.dob_a + k) = r;
    }
    for (int k = 0; k < L.n_dob_b; ++k) {
        Row r = dob_b_ss_.B(k, 0) * dob_b_in;
        for (int j = 0; j < L.n_dob_b; ++j) r += dob_b_ss_.A(k, j) * unit(L.dob_b + j);
        Mx.row(L.dob_b + k) = r;
    }

    ModeSystem m;
    m.A = Mx.leftCols(n);
    m.B = Mx.rightCols(kInputs);
    m.u_row = u;
    m.tau_e_row = tau_e;
    return m;
}

void ClosedLoop::discretize(ModeSystem& m) const {
    const int n = lay_.n;
    const double h = sim_.dt;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.A, false);
    double max_re = -std::numeric_limits<double>::infinity();
    m.spectral_radius = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        m.spectral_radius = std::max(m.spectral_radius, std::abs(es.eigenvalues()(i)));
        max_re = std::max(max_re, es.eigenvalues()(i).real());
    }

    if (sim_.solver == Solver::Exact) {
        Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + kInputs, n + kInputs);
        aug.topLeftCorner(n, n) = m.A * h;
        aug.topRightCorner(n, kInputs) = m.B * h;
        const Eigen::VectorXd d = lti::balance_matrix(aug);
        const Eigen::MatrixXd e = aug.exp();
        const Eigen::MatrixXd full = d.asDiagonal() * e * d.cwiseInverse().asDiagonal();
        m.Phi = full.topLeftCorner(n, n);
        m.Gam = full.topRightCorner(n, kInputs);
        return;
    }

    // Classical RK4 applied to x' = A x + B w with w held over the step.
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd hA = h * m.A;
    const Eigen::MatrixXd hA2 = hA * hA;
    const Eigen::MatrixXd hA3 = hA2 * hA;
    m.Phi = I + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 * hA / 24.0;
    m.Gam = h * (I + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0) * m.B;
    if (max_re <= 1e-9 * std::max(1.0, m.spectral_radius)) {
        Eigen::EigenSolver<Eigen::MatrixXd> ed(m.Phi, false);
        double rho = 0.0;
        for (Eigen::Index i = 0; i < ed.eigenvalues().size(); ++i) rho = std::max(rho, std::abs(ed.eigenvalues()(i)));
        if (rho > 1.0 + 1e-9) {
            throw ConfigError("rk4 is unstable at dt = " + std::to_string(h) + " for this loop (|lambda|max = " +
                              std::to_string(m.spectral_radius) + " rad/s); use the exact solver");
        }
    }
}

bool ClosedLoop::in_contact(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const {
    if (env_.contact == Contact::Bilateral) return true;
    if (x(lay_.theta_l) <= env_.gap) return false;
    Eigen::VectorXd z(lay_.n + kInputs);
    z << x, w;
    // The environment only pushes.
    return contact_.tau_e_row.dot(z) <= 0.0;
}

Eigen::VectorXd ClosedLoop::step(const Eigen::VectorXd& x, const Eigen::VectorXd& w, bool contact) const {
    const ModeSystem& m = contact ? contact_ : free_;
    return m.Phi * x + m.Gam * w;
}

Eigen::VectorXd ClosedLoop::steady_state(const Eigen::VectorXd& w) const {
    // Solve A x = -B w. Left null vectors l of A are conserved (l'x stays at
    // its zero initial value), which pins the components A leaves free.
    Eigen::MatrixXd Ab = contact_.A;
    const Eigen::VectorXd d = lti::balance_matrix(Ab);
    const Eigen::VectorXd rhs = -(d.cwiseInverse().asDiagonal() * (contact_.B * w));
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ab, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double cut = 1e-11 * sv(0);
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) <= cut) null_cols.push_back(i);
    }
    const Eigen::Index n = Ab.rows();
    const auto k = static_cast<Eigen::Index>(null_cols.size());
    Eigen::MatrixXd S(n + k, n);
    Eigen::VectorXd r(n + k);
    S.topRows(n) = Ab;
    r.head(n) = rhs;
    for (Eigen::Index j = 0; j < k; ++j) {
        S.row(n + j) = svd.matrixU().col(null_cols[j]).transpose() * sv(0);
        r(n + j) = 0.0;
    }
    const Eigen::VectorXd y = S.colPivHouseholderQr().solve(r);
    return d.asDiagonal() * y;
}

Complex ClosedLoop::continuous_response(int input, int state, double omega, bool contact) const {
    const ModeSystem& m = contact ? contact_ : free_;
    const int n = lay_.n;
    const Eigen::MatrixXcd M = Complex(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) - m.A.cast<Complex>();
    const Eigen::VectorXcd x = M.partialPivLu().solve(m.B.col(input).cast<Complex>());
    return x(state);
}

Complex ClosedLoop::discrete_response(int input, int state, double omega, bool contact) const {
    const ModeSystem& m = contact ? contact_ : free_;
    const int n = lay_.n;
    const Complex z = std::exp(Complex(0.0, omega * sim_.dt));
    const Eigen::MatrixXcd M = z * Eigen::MatrixXcd::Identity(n, n) - m.Phi.cast<Complex>();
    const Eigen::VectorXcd x = M.partialPivLu().solve(m.Gam.col(input).cast<Complex>());
    return x(state);
}

ClosedLoop build_closed_loop(const SeaConfig& cfg, const EnvironmentModel& env, const SimConfig& sim) {
    return ClosedLoop(cfg, env, sim);
}

}  // namespace seaz::sim
