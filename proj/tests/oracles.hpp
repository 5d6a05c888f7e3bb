#pragma once

// Independent reference computations used by the tests. Nothing here goes
// through the library's polynomial assembly.

#include <complex>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "seaz/sea_model.hpp"

namespace oracle {

using cd = std::complex<double>;
using seaz::model::Architecture;
using seaz::model::FeedforwardKind;
using seaz::model::SeaConfig;

struct Blocks {
    cd M, M_hat, C, I, Q, P_t_inv, C_ff;
};

inline Blocks blocks_at(const SeaConfig& c, cd s) {
    Blocks b;
    const auto& p = c.plant;
    b.M = 1.0 / (p.J_m * s + p.B_m);
    b.M_hat = 1.0 / (c.nominal.J_m_hat * s + c.nominal.B_m_hat);
    b.C = c.gains.K_p + c.gains.K_d * s;
    b.I = (c.imp.K_imp + c.imp.B_imp * s) / s;
    const double w = c.q.omega;
    b.Q = c.q0() * w * w / (s * s + 2.0 * c.q.zeta * w * s + w * w);
    // u -> tau_s with the load held: K/s N Mhat closed around the gear reaction N.
    const cd fwd = p.K / s * p.N * b.M_hat;
    const cd p_t = fwd / (1.0 + fwd * p.N);
    b.P_t_inv = 1.0 / p_t;
    b.C_ff = 0.0;
    if (c.ff == FeedforwardKind::Original && c.arch == Architecture::Dobt) b.C_ff = b.Q * b.P_t_inv;
    if (c.ff == FeedforwardKind::Proposed) {
        b.C_ff = p.N * (1.0 - b.Q);
        if (c.arch == Architecture::Dobt) b.C_ff += b.Q * b.P_t_inv;
    }
    return b;
}

// Spring torque from solving the loop equations directly for the unknowns
// [tau_s, omega_m, u, u_c, tau_ref, dhat] at one complex frequency.
inline cd solve_tau(const SeaConfig& c, cd s, cd omega_l, cd d) {
    const Blocks b = blocks_at(c, s);
    const double K = c.plant.K, N = c.plant.N;
    Eigen::Matrix<cd, 6, 6> A = Eigen::Matrix<cd, 6, 6>::Zero();
    Eigen::Matrix<cd, 6, 1> r = Eigen::Matrix<cd, 6, 1>::Zero();
    enum { kTau = 0, kWm, kU, kUc, kRef, kDhat };
    // tau_s - K/s N omega_m = K/s omega_l
    A(0, kTau) = 1.0;
    A(0, kWm) = -K / s * N;
    r(0) = K / s * omega_l;
    // omega_m - M u + M N tau_s = M d
    A(1, kWm) = 1.0;
    A(1, kU) = -b.M;
    A(1, kTau) = b.M * N;
    r(1) = b.M * d;
    // tau_ref = I omega_l
    A(2, kRef) = 1.0;
    r(2) = b.I * omega_l;
    // u_c = C (tau_ref - tau_s) + C_ff tau_ref
    A(3, kUc) = 1.0;
    A(3, kRef) = -(b.C + b.C_ff);
    A(3, kTau) = b.C;
    // u = u_c - dhat
    A(4, kU) = 1.0;
    A(4, kUc) = -1.0;
    A(4, kDhat) = 1.0;
    // dhat = Q (x - u), x = Mhat^-1 omega_m or P_t^-1 tau_s
    A(5, kDhat) = 1.0;
    switch (c.arch) {
        case Architecture::NoDob: break;
        case Architecture::Dobm:
            A(5, kWm) = -b.Q / b.M_hat;
            A(5, kU) = b.Q;
            break;
        case Architecture::Dobt:
            A(5, kTau) = -b.Q * b.P_t_inv;
            A(5, kU) = b.Q;
            break;
    }
    const Eigen::Matrix<cd, 6, 1> x = A.fullPivLu().solve(r);
    return x(kTau);
}

inline cd z_s(const SeaConfig& c, double omega) {
    const cd s(0.0, omega);
    return solve_tau(c, s, 1.0, 0.0);
}

inline cd d_s(const SeaConfig& c, double omega) {
    const cd s(0.0, omega);
    return solve_tau(c, s, 0.0, 1.0);
}

inline double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Random configuration over the swept gain and filter ranges, with optional model mismatch.
inline SeaConfig random_config(std::mt19937& rng, Architecture a, bool mismatch = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SeaConfig c;
    c.arch = a;
    c.gains.K_p = std::pow(10.0, -1.0 + 2.0 * u(rng));
    c.gains.K_d = 0.1 * u(rng);
    c.imp.K_imp = c.plant.K * 3.0 * u(rng);
    c.imp.B_imp = u(rng);
    c.q.omega = seaz::model::hz_to_rad(5.0 + 95.0 * u(rng));
    c.q.zeta = 0.5 + u(rng);
    if (mismatch) {
        c.nominal.J_m_hat = c.plant.J_m * (0.5 + u(rng));
        c.nominal.B_m_hat = c.plant.B_m * (0.5 + u(rng));
    }
    const double f = u(rng);
    c.ff = f < 0.3 ? FeedforwardKind::Zero : FeedforwardKind::Original;
    if (a != Architecture::NoDob && f > 0.6) c.ff = FeedforwardKind::Proposed;
    return c;
}

}  // namespace oracle
