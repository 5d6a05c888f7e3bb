#pragma once

// Time-domain simulation of the SEA coupled to a contact environment,
// a binary stability classifier and the prediction-vs-simulation study.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seaz/metrics.hpp"
#include "seaz/passivity.hpp"
#include "seaz/sea_model.hpp"

namespace seaz::sim {

using model::SeaConfig;

enum class Contact { Bilateral, Unilateral };

struct EnvironmentModel {
    double K_e = 0.0;
    double B_e = 0.0;
    double m_e = 0.0;  // bilateral only
    Contact contact = Contact::Bilateral;
    double gap = 0.0;

    void validate() const;
};

// The two stiff environments used by default: K_e = 10 K and 100 K, B_e = 0.01 K_e.
std::vector<EnvironmentModel> default_environments(const model::PlantParams& p);

enum class Solver { RK4, Exact };

std::string_view to_string(Solver s);
Solver parse_solver(std::string_view s);

struct SimConfig {
    double dt = 1e-4;
    double duration = 2.0;
    Solver solver = Solver::Exact;
    std::optional<double> derivative_filter_cutoff;  // rad/s, unset: 1e6
    double noise_amplitude = 0.0;                    // uniform torque-sensor noise
    std::uint32_t noise_seed = 1;
    double coulomb = 0.0;                            // motor-side Coulomb friction magnitude
    double divergence_factor = 1e3;

    double filter_cutoff() const { return derivative_filter_cutoff.value_or(1e6); }
    void validate() const;
};

// Exogenous inputs, held constant over each step.
enum Input : int { kOne = 0, kThetaD = 1, kDist = 2, kNoise = 3, kInputs = 4 };

// Continuous and discretized closed loop for one contact mode.
struct ModeSystem {
    Eigen::MatrixXd A;    // n x n
    Eigen::MatrixXd B;    // n x kInputs
    Eigen::MatrixXd Phi;  // exp(A dt)
    Eigen::MatrixXd Gam;  // integral of exp(A t) B over one step
    Eigen::RowVectorXd u_row;      // motor command over [x; w]
    Eigen::RowVectorXd tau_e_row;  // environment torque over [x; w]
    double spectral_radius = 0.0;
};

struct StateLayout {
    int theta_m = 0;
    int omega_m = 1;
    int tau_s = 2;
    int omega_l = 3;
    int theta_l = 4;
    int deriv = 5;
    int ff = 6;
    int n_ff = 0;
    int dob_a = 0;
    int n_dob_a = 0;
    int dob_b = 0;
    int n_dob_b = 0;
    int n = 6;
};

class ClosedLoop {
public:
    ClosedLoop(const SeaConfig& cfg, const EnvironmentModel& env, const SimConfig& sim);

    const SeaConfig& config() const { return cfg_; }
    const EnvironmentModel& environment() const { return env_; }
    const SimConfig& sim() const { return sim_; }
    const StateLayout& layout() const { return lay_; }
    const ModeSystem& contact_mode() const { return contact_; }
    const ModeSystem& free_mode() const { return free_; }

    // Picks the contact mode for the current state (unilateral contact law).
    bool in_contact(const Eigen::VectorXd& x, const Eigen::VectorXd& w) const;

    // One step of length dt with inputs held.
    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& w, bool contact) const;

    // Steady state of the contact mode under constant inputs w.
    Eigen::VectorXd steady_state(const Eigen::VectorXd& w) const;

    // Continuous and one-step-discretized responses from input j to state i.
    lti::Complex continuous_response(int input, int state, double omega, bool contact = true) const;
    lti::Complex discrete_response(int input, int state, double omega, bool contact = true) const;

private:
    ModeSystem assemble(bool contact) const;
    void discretize(ModeSystem& m) const;

    SeaConfig cfg_;
    EnvironmentModel env_;
    SimConfig sim_;
    StateLayout lay_;
    model::Blocks blocks_;
    lti::StateSpace ff_ss_, dob_a_ss_, dob_b_ss_;
    ModeSystem contact_;
    ModeSystem free_;
};

ClosedLoop build_closed_loop(const SeaConfig& cfg, const EnvironmentModel& env, const SimConfig& sim);

struct Scenario {
    enum class Kind { StepInContact, Collision };
    Kind kind = Kind::StepInContact;
    double step = 1e-3;               // theta_d for step_in_contact
    double approach_velocity = 0.1;   // initial omega_l for collision
    double command_offset = 0.0;      // theta_d - theta_l(0) for collision

    static Scenario step_in_contact(double step) { return {Kind::StepInContact, step, 0.0, 0.0}; }
    static Scenario collision(double v0, double offset = 0.0) { return {Kind::Collision, 0.0, v0, offset}; }
};

struct Trajectory {
    std::vector<double> t, omega_m, omega_l, theta_l, tau_s, tau_e, u;
    passivity::EnergyLedger spring_energy;  // tau_s * omega_l
    passivity::EnergyLedger load_energy;    // tau_e * omega_l, environment into robot positive
    double energy_sign = 1.0;
    double initial_energy = 0.0;            // kinetic energy of the load at t = 0
    double command_scale = 0.0;             // divergence reference length
    double residual_max = 0.0;              // max |tau_s - K (theta_l + N theta_m)|
    double noise_amplitude = 0.0;
    bool diverged = false;
    std::string diverged_reason;

    std::size_t size() const { return t.size(); }
};

Trajectory run_scenario(const ClosedLoop& sys, const Scenario& sc, double energy_sign = 1.0);

void write_csv(const Trajectory& traj, std::ostream& os);

enum class Outcome { Stable, Unstable };
enum class Reason { Converged, Divergence, SustainedOscillation, GrowingOscillation };

std::string_view to_string(Outcome o);
std::string_view to_string(Reason r);

struct ClassifierOptions {
    double tail_fraction = 0.5;
    int window_cycles = 5;
    double growth_threshold = 1.02;
    double decay_threshold = 0.98;
    double floor_factor = 10.0;
    double divergence_factor = 1e3;
    std::size_t min_samples = 64;
};

struct StabilityVerdict {
    Outcome outcome = Outcome::Stable;
    Reason reason = Reason::Converged;
    double growth_ratio = 0.0;
    int half_cycles = 0;
};

// Verdict from a single signal; used directly on analytic test signals.
StabilityVerdict classify_signal(const std::vector<double>& x, const ClassifierOptions& opt = {}, double floor = 0.0);

StabilityVerdict classify_stability(const Trajectory& traj, const ClassifierOptions& opt = {});

struct StudyRow {
    SeaConfig cfg;
    std::size_t env_index = 0;
    bool spring_pass = false;
    bool load_strict_pass = false;
    bool load_threshold_pass = false;
    StabilityVerdict sim;
    std::string error;
};

struct Tally {
    int fp = 0;
    int fn = 0;
    int tp = 0;
    int tn = 0;
};

struct StudyReport {
    std::vector<EnvironmentModel> environments;
    std::vector<StudyRow> rows;  // one per (grid row, environment)
    // tallies[arch][condition]
    std::vector<std::pair<model::Architecture, std::vector<std::pair<metrics::Condition, Tally>>>> tallies;
    int errors = 0;

    Tally total(metrics::Condition c) const;
};

struct StudyOptions {
    double step = 1e-3;
    ClassifierOptions classifier;
    metrics::StiffnessOptions analysis;
    unsigned threads = 0;
};

StudyReport fpfn_study(const metrics::SweepGrid& grid, const std::vector<EnvironmentModel>& envs, const SimConfig& sim,
                       const StudyOptions& opt = {});

}  // namespace seaz::sim
