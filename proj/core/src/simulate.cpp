#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "seaz/error.hpp"
#include "seaz/simulate.hpp"

namespace seaz::sim {

Trajectory run_scenario(const ClosedLoop& sys, const Scenario& sc, double energy_sign) {
    const StateLayout& L = sys.layout();
    const SeaConfig& cfg = sys.config();
    const SimConfig& sim = sys.sim();
    const EnvironmentModel& env = sys.environment();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(L.n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(kInputs);
    w(kOne) = 1.0;
    w(kDist) = cfg.d_const;

    Trajectory tr;
    tr.energy_sign = energy_sign;
    tr.noise_amplitude = sim.noise_amplitude;
    double command = 0.0;
    switch (sc.kind) {
        case Scenario::Kind::StepInContact:
            w(kThetaD) = sc.step;
            command = std::abs(sc.step);
            tr.command_scale = command > 0.0 ? command : 1e-3;
            break;
        case Scenario::Kind::Collision:
            x(L.omega_l) = sc.approach_velocity;
            w(kThetaD) = sc.command_offset;
            command = std::abs(sc.command_offset);
            tr.command_scale = std::max({command, env.gap, 0.1 * std::abs(sc.approach_velocity), 1e-9});
            break;
    }
    tr.initial_energy = 0.5 * cfg.plant.J_l * x(L.omega_l) * x(L.omega_l);
    // Preload of the virtual spring when the command starts away from the load.
    const double preload = 0.5 * cfg.imp.K_imp * command * command;

    const auto steps = static_cast<std::size_t>(std::llround(sim.duration / sim.dt));
    for (auto* v : {&tr.t, &tr.omega_m, &tr.omega_l, &tr.theta_l, &tr.tau_s, &tr.tau_e, &tr.u}) v->reserve(steps + 1);

    std::mt19937 rng(sim.noise_seed);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    const double bound = sim.divergence_factor * tr.command_scale;
    Eigen::VectorXd z(L.n + kInputs);

    for (std::size_t k = 0; k <= steps; ++k) {
        if (sim.coulomb > 0.0) {
            const double wm = x(L.omega_m);
            w(kDist) = cfg.d_const - sim.coulomb * static_cast<double>((wm > 0.0) - (wm < 0.0));
        }
        if (sim.noise_amplitude > 0.0) w(kNoise) = sim.noise_amplitude * noise(rng);

        const bool contact = sys.in_contact(x, w);
        const ModeSystem& mode = contact ? sys.contact_mode() : sys.free_mode();
        z << x, w;
        const double tau_e = contact ? mode.tau_e_row.dot(z) : 0.0;

        tr.t.push_back(static_cast<double>(k) * sim.dt);
        tr.omega_m.push_back(x(L.omega_m));
        tr.omega_l.push_back(x(L.omega_l));
        tr.theta_l.push_back(x(L.theta_l));
        tr.tau_s.push_back(x(L.tau_s));
        tr.tau_e.push_back(tau_e);
        tr.u.push_back(mode.u_row.dot(z));
        tr.residual_max = std::max(
            tr.residual_max, std::abs(x(L.tau_s) - cfg.plant.K * (x(L.theta_l) + cfg.plant.N * x(L.theta_m))));

        if (!x.allFinite() || !std::isfinite(tau_e)) {
            tr.diverged = true;
            tr.diverged_reason = "non-finite state";
            break;
        }
        if (std::abs(x(L.theta_l)) > bound) {
            tr.diverged = true;
            tr.diverged_reason = "load position exceeded divergence bound";
            break;
        }
        if (k < steps) x = sys.step(x, w, contact);
    }

    tr.spring_energy = passivity::passivity_observer(tr.tau_s, tr.omega_l, sim.dt, -1.0, energy_sign);
    tr.load_energy = passivity::passivity_observer(tr.tau_e, tr.omega_l, sim.dt, -1.0, energy_sign);
    // The robot may return what it held at t = 0 without violating passivity,
    // and the rectangle rule cannot resolve less than one sample of power.
    const auto quantum = [&](const std::vector<double>& tq) {
        double p = 0.0;
        for (std::size_t k = 0; k < tq.size(); ++k) p = std::max(p, std::abs(tq[k] * tr.omega_l[k]));
        return sim.dt * p;
    };
    tr.spring_energy.tol_energy += preload + quantum(tr.tau_s);
    tr.load_energy.tol_energy += tr.initial_energy + preload + quantum(tr.tau_e);
    tr.spring_energy.violation = tr.spring_energy.min_energy < -tr.spring_energy.tol_energy;
    tr.load_energy.violation = tr.load_energy.min_energy < -tr.load_energy.tol_energy;
    return tr;
}

void write_csv(const Trajectory& tr, std::ostream& os) {
    os << "t,omega_m,omega_l,theta_l,tau_s,tau_e,u,E_spring,E_load\n";
    os.precision(12);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << tr.t[k] << ',' << tr.omega_m[k] << ',' << tr.omega_l[k] << ',' << tr.theta_l[k] << ',' << tr.tau_s[k]
           << ',' << tr.tau_e[k] << ',' << tr.u[k] << ',' << tr.spring_energy.energy[k] << ','
           << tr.load_energy.energy[k] << '\n';
    }
}

}  // namespace seaz::sim
