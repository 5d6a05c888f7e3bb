#pragma once

// SEA plant, controller blocks and port dynamics for the three torque-control
// architectures (no DOB, DOB around the motor, DOB around the spring torque).
//
// Signal conventions
//   spring      tau_s = K/s * (omega_l + N * omega_m)
//   motor       omega_m = M * (u - N * tau_s + d)
//   load        J_l * domega_l/dt = tau_e - tau_s - B_l * omega_l
//   impedance   tau_ref = I * omega_l,  I = (K_imp + B_imp s)/s
//   torque loop u_c = C (tau_ref - tau_s) + C_ff tau_ref,  C = K_p + K_d s
//   DOBm        u = u_c - dhat,  dhat = Q (Mhat^-1 omega_m - u)
//   DOBt        u = u_c - dhat,  dhat = Q (P_t^-1 tau_s - u)

#include <optional>
#include <string>
#include <string_view>

#include "seaz/lti.hpp"

namespace seaz::model {

using lti::Complex;
using lti::Polynomial;
using lti::RationalTF;

struct PlantParams {
    double J_m = 6.4e-6;
    double B_m = 6e-5;
    double J_l = 7.0;
    double B_l = 100.0;
    double K = 141350.0;
    double N = 1.0 / 7854.0;

    void validate() const;
};

struct NominalParams {
    double J_m_hat = 6.4e-6;
    double B_m_hat = 6e-5;

    static NominalParams matching(const PlantParams& p) { return {p.J_m, p.B_m}; }
    void validate() const;
};

struct ControllerGains {
    double K_p = 1.0;
    double K_d = 0.01;

    void validate() const;
};

struct ImpedanceParams {
    double K_imp = 0.0;
    double B_imp = 0.0;

    void validate() const;
};

constexpr double kTwoPi = 6.283185307179586;
constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }

struct QFilterSpec {
    double omega = hz_to_rad(25.0);  // rad/s
    double zeta = 1.0;
    std::optional<double> q0;        // unset: 0.99 with proposed feedforward, else 1

    void validate() const;
};

enum class Architecture { NoDob, Dobm, Dobt };
enum class FeedforwardKind { Zero, Original, Proposed };

std::string_view to_string(Architecture a);
std::string_view to_string(FeedforwardKind f);
Architecture parse_architecture(std::string_view s);
FeedforwardKind parse_feedforward(std::string_view s);

struct SeaConfig {
    PlantParams plant;
    NominalParams nominal;
    ControllerGains gains;
    ImpedanceParams imp;
    QFilterSpec q;
    Architecture arch = Architecture::NoDob;
    FeedforwardKind ff = FeedforwardKind::Original;
    double d_const = 0.0;

    double q0() const;
    void validate() const;
};

struct PlantTFs {
    RationalTF M;
    RationalTF L;
};

struct NominalPlants {
    RationalTF P_m;
    RationalTF P_t;
};

PlantTFs plant_tfs(const PlantParams& p);
RationalTF q_filter(const QFilterSpec& spec);
RationalTF q_filter(double omega, double zeta, double q0);
RationalTF controller_tf(const ControllerGains& g);
RationalTF impedance_tf(const ImpedanceParams& i);

// P_m = Mhat. P_t is the u -> tau_s map with the load held fixed,
// fb(K s^-1 N Mhat, N) = K N Mhat / (s + N^2 K Mhat).
NominalPlants nominal_plants(const NominalParams& n, const PlantParams& p);

// fb(Mhat, K s^-1) without gear factors, kept for comparison.
RationalTF p_t_without_gear(const NominalParams& n, const PlantParams& p);

// Mtilde = M Mhat / ((1 - Q) Mhat + Q M), the motor seen through the DOBm loop.
RationalTF effective_motor(const RationalTF& m, const RationalTF& m_hat, const RationalTF& q);

RationalTF feedforward_tf(FeedforwardKind kind, Architecture arch, const RationalTF& q, const RationalTF& p_t,
                          double N);

// All blocks of a configured loop.
struct Blocks {
    RationalTF M;
    RationalTF L;
    RationalTF M_hat;
    RationalTF M_tilde;
    RationalTF C;
    RationalTF C_ff;
    RationalTF I;
    RationalTF Q;
    RationalTF P_t;
    RationalTF P_t_inv;
};

Blocks build_blocks(const SeaConfig& cfg);

struct PortDynamics {
    RationalTF Z_s;  // omega_l -> tau_s
    RationalTF D_s;  // d -> tau_s
    Architecture arch = Architecture::NoDob;
};

PortDynamics spring_port(const SeaConfig& cfg);
// Assembles from caller-supplied C, C_ff, Q (plant and nominal motor from cfg).
PortDynamics spring_port(const SeaConfig& cfg, const Blocks& b);

struct LoadPort {
    RationalTF Y_l;
    RationalTF Z_l;
};

LoadPort load_port(const RationalTF& z_s, const PlantParams& p);

}  // namespace seaz::model
