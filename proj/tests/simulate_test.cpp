#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "seaz/error.hpp"
#include "seaz/metrics.hpp"
#include "seaz/simulate.hpp"

using namespace seaz;
using namespace seaz::sim;
using model::Architecture;
using model::FeedforwardKind;
using model::hz_to_rad;

namespace {

const Architecture kArchs[] = {Architecture::NoDob, Architecture::Dobm, Architecture::Dobt};

SeaConfig stable_config(Architecture a) {
    SeaConfig c;
    c.arch = a;
    c.ff = FeedforwardKind::Zero;
    c.imp = {1000.0, 0.1};
    return c;
}

EnvironmentModel stiff_env() { return default_environments(model::PlantParams{}).front(); }

// Rendered stiffness from the series connection with the environment.
double rendered_from_series(double tau_per_step, double K_e) { return 1.0 / (1.0 / tau_per_step - 1.0 / K_e); }

std::vector<double> sampled(int n, const std::function<double(double)>& f, double dt) {
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = f(k * dt);
    return x;
}

}  // namespace

TEST_SUITE("simulate") {
    TEST_CASE("default environments") {
        const auto envs = default_environments(model::PlantParams{});
        REQUIRE(envs.size() == 2);
        CHECK(envs[0].K_e == 10.0 * 141350.0);
        CHECK(envs[1].K_e == 100.0 * 141350.0);
        CHECK(envs[1].B_e == doctest::Approx(0.01 * envs[1].K_e));
    }

    TEST_CASE("environment and simulation validation") {
        EnvironmentModel e;
        e.gap = 1e-3;
        CHECK_THROWS_AS(e.validate(), ConfigError);
        e.contact = Contact::Unilateral;
        CHECK_NOTHROW(e.validate());
        e.m_e = 1.0;
        CHECK_THROWS_AS(e.validate(), ConfigError);
        SimConfig s;
        s.duration = 5.0 * s.dt;
        CHECK_THROWS_AS(s.validate(), ConfigError);
        s = {};
        s.derivative_filter_cutoff = 0.0;
        CHECK_THROWS_AS(s.validate(), ConfigError);
        CHECK(parse_solver("rk4") == Solver::RK4);
        CHECK_THROWS_AS(parse_solver("euler"), ConfigError);
    }

    TEST_CASE("coarse steps are rejected") {
        SeaConfig c = stable_config(Architecture::Dobm);
        c.q.omega = hz_to_rad(100.0);
        SimConfig s;
        s.dt = 1e-3;
        CHECK_THROWS_AS(build_closed_loop(c, stiff_env(), s), ConfigError);
    }

    TEST_CASE("zero input gives a zero trajectory") {
        for (Architecture a : kArchs) {
            SimConfig s;
            s.duration = 0.2;
            const ClosedLoop sys = build_closed_loop(stable_config(a), stiff_env(), s);
            const Trajectory tr = run_scenario(sys, Scenario::step_in_contact(0.0));
            for (std::size_t k = 0; k < tr.size(); ++k) {
                CHECK(tr.tau_s[k] == 0.0);
                CHECK(tr.theta_l[k] == 0.0);
                CHECK(tr.u[k] == 0.0);
            }
        }
    }

    TEST_CASE("steady state matches the DC rendered stiffness") {
        for (Architecture a : kArchs) {
            const SeaConfig c = stable_config(a);
            const EnvironmentModel env = stiff_env();
            const ClosedLoop sys = build_closed_loop(c, env, SimConfig{});
            Eigen::VectorXd w = Eigen::VectorXd::Zero(kInputs);
            w(kThetaD) = 1.0;
            const Eigen::VectorXd x = sys.steady_state(w);
            const double kr = rendered_from_series(std::abs(x(sys.layout().tau_s)), env.K_e);
            const double dc = metrics::dc_rendered_stiffness(c).formula;
            INFO(model::to_string(a) << ": simulated " << kr << " formula " << dc);
            CHECK(std::abs(kr - dc) <= 5e-3 * dc);
        }
    }

    TEST_CASE("step response settles at the DC rendered stiffness") {
        const SeaConfig c = stable_config(Architecture::Dobm);
        const EnvironmentModel env = stiff_env();
        SimConfig s;
        s.duration = 3.0;
        const double step = 1e-3;
        const Trajectory tr = run_scenario(build_closed_loop(c, env, s), Scenario::step_in_contact(step));
        const double kr = rendered_from_series(std::abs(tr.tau_s.back()) / step, env.K_e);
        CHECK(kr == doctest::Approx(metrics::dc_rendered_stiffness(c).formula).epsilon(5e-3));
        CHECK(tr.residual_max <= 1e-9 * c.plant.K);
    }

    TEST_CASE("discretized loop follows the continuous design") {
        for (Architecture a : kArchs) {
            const ClosedLoop sys = build_closed_loop(stable_config(a), stiff_env(), SimConfig{});
            const double nyquist = M_PI / sys.sim().dt;
            double worst = 0.0;
            for (double w = 1.0; w <= nyquist / 10.0; w *= 1.2) {
                const auto hc = sys.continuous_response(kThetaD, sys.layout().tau_s, w);
                const auto hd = sys.discrete_response(kThetaD, sys.layout().tau_s, w);
                worst = std::max(worst, std::abs(std::abs(hd) / std::abs(hc) - 1.0));
            }
            INFO(model::to_string(a));
            CHECK(worst < 0.02);
        }
    }

    TEST_CASE("stable settings stay bounded in stiff contact") {
        for (Architecture a : {Architecture::NoDob, Architecture::Dobm}) {
            for (const EnvironmentModel& env : default_environments(model::PlantParams{})) {
                const ClosedLoop sys = build_closed_loop(stable_config(a), env, SimConfig{});
                const Trajectory tr = run_scenario(sys, Scenario::step_in_contact(1e-3));
                CHECK_FALSE(tr.diverged);
                CHECK(classify_stability(tr).outcome == Outcome::Stable);
                CHECK_FALSE(tr.load_energy.violation);
            }
        }
    }

    TEST_CASE("the load limit separates stable from unstable contact with a lossless spring") {
        // A stiff damped wall hides the active band; a soft lossless one exposes it.
        SeaConfig c = stable_config(Architecture::NoDob);
        c.imp.B_imp = 0.0;
        const double limit = metrics::max_safe_stiffness(c, metrics::Condition::LoadStrict).k_max;
        EnvironmentModel soft;
        soft.K_e = 1e4;
        for (double f : {0.5, 0.9}) {
            c.imp.K_imp = f * limit;
            const auto tr = run_scenario(build_closed_loop(c, soft, SimConfig{}), Scenario::step_in_contact(1e-3));
            CHECK(classify_stability(tr).outcome == Outcome::Stable);
        }
        for (double f : {1.1, 3.0}) {
            c.imp.K_imp = f * limit;
            const auto tr = run_scenario(build_closed_loop(c, soft, SimConfig{}), Scenario::step_in_contact(1e-3));
            CHECK(classify_stability(tr).outcome == Outcome::Unstable);
        }
    }

    TEST_CASE("unilateral contact only pushes") {
        for (Architecture a : kArchs) {
            EnvironmentModel env = stiff_env();
            env.contact = Contact::Unilateral;
            env.gap = 1e-4;
            SimConfig s;
            s.duration = 0.5;
            const Trajectory tr =
                run_scenario(build_closed_loop(stable_config(a), env, s), Scenario::collision(0.05, 0.0));
            bool touched = false;
            for (std::size_t k = 0; k < tr.size(); ++k) {
                if (tr.theta_l[k] <= env.gap) CHECK(tr.tau_e[k] == 0.0);
                CHECK(tr.tau_e[k] <= 0.0);
                touched = touched || tr.tau_e[k] < 0.0;
            }
            CHECK(touched);
            CHECK_FALSE(tr.load_energy.violation);
        }
    }

    TEST_CASE("halving the step barely moves the final torque") {
        const SeaConfig c = stable_config(Architecture::Dobm);
        SimConfig s;
        s.duration = 1.0;
        const auto a = run_scenario(build_closed_loop(c, stiff_env(), s), Scenario::step_in_contact(1e-3));
        s.dt *= 0.5;
        const auto b = run_scenario(build_closed_loop(c, stiff_env(), s), Scenario::step_in_contact(1e-3));
        CHECK(b.tau_s.back() == doctest::Approx(a.tau_s.back()).epsilon(1e-2));
    }

    TEST_CASE("RK4 and exact discretization agree") {
        const SeaConfig c = stable_config(Architecture::Dobm);
        SimConfig s;
        s.duration = 0.5;
        s.dt = 1e-5;
        s.derivative_filter_cutoff = 1e4;
        const auto exact = run_scenario(build_closed_loop(c, stiff_env(), s), Scenario::step_in_contact(1e-3));
        s.solver = Solver::RK4;
        const auto rk4 = run_scenario(build_closed_loop(c, stiff_env(), s), Scenario::step_in_contact(1e-3));
        double worst = 0.0, peak = 0.0;
        for (std::size_t k = 0; k < exact.size(); ++k) {
            worst = std::max(worst, std::abs(exact.tau_s[k] - rk4.tau_s[k]));
            peak = std::max(peak, std::abs(exact.tau_s[k]));
        }
        CHECK(worst <= 1e-4 * peak);
    }

    TEST_CASE("trajectory export has the documented header") {
        SimConfig s;
        s.duration = 0.01;
        const auto tr = run_scenario(build_closed_loop(stable_config(Architecture::NoDob), stiff_env(), s),
                                     Scenario::step_in_contact(1e-3));
        std::ostringstream os;
        write_csv(tr, os);
        std::istringstream is(os.str());
        std::string header;
        std::getline(is, header);
        CHECK(header == "t,omega_m,omega_l,theta_l,tau_s,tau_e,u,E_spring,E_load");
        std::size_t lines = 0;
        for (std::string line; std::getline(is, line);) ++lines;
        CHECK(lines == tr.size());
    }

    TEST_CASE("classifier: decaying oscillation is stable") {
        const auto x = sampled(20000, [](double t) { return std::exp(-t) * std::sin(50.0 * t); }, 1e-3);
        const auto v = classify_signal(x);
        CHECK(v.outcome == Outcome::Stable);
        CHECK(v.reason == Reason::Converged);
    }

    TEST_CASE("classifier: growing oscillation") {
        // 5 percent growth per cycle of 2 pi / 50 s.
        const double rate = std::log(1.05) * 50.0 / (2.0 * M_PI);
        const auto x = sampled(5000, [&](double t) { return 1e-3 * std::exp(rate * t) * std::sin(50.0 * t); }, 1e-3);
        const auto v = classify_signal(x);
        CHECK(v.outcome == Outcome::Unstable);
        CHECK(v.reason == Reason::GrowingOscillation);
        CHECK(v.growth_ratio == doctest::Approx(std::pow(1.05, 5)).epsilon(2e-2));
    }

    TEST_CASE("classifier: sustained oscillation") {
        const auto x = sampled(5000, [](double t) { return 2.0 + std::sin(50.0 * t); }, 1e-3);
        const auto v = classify_signal(x);
        CHECK(v.outcome == Outcome::Unstable);
        CHECK(v.reason == Reason::SustainedOscillation);
    }

    TEST_CASE("classifier: oscillation below the floor is stable") {
        const auto x = sampled(5000, [](double t) { return 1.0 + 1e-9 * std::sin(50.0 * t); }, 1e-3);
        CHECK(classify_signal(x, {}, 1e-6).outcome == Outcome::Stable);
    }

    TEST_CASE("classifier: runaway ramp diverges") {
        const auto x = sampled(5000, [](double t) { return std::exp(3.0 * t); }, 1e-3);
        CHECK(classify_signal(x).reason == Reason::Divergence);
    }

    TEST_CASE("classifier rejects short signals") {
        CHECK_THROWS_AS(classify_signal(std::vector<double>(10, 0.0)), InvalidInput);
    }

    TEST_CASE("study is deterministic and tallies every run") {
        metrics::SweepGrid g;
        g.base = stable_config(Architecture::NoDob);
        g.K_p = {1.0, 5.0};
        g.arch = {Architecture::NoDob, Architecture::Dobm};
        const auto envs = default_environments(g.base.plant);
        SimConfig s;
        s.duration = 0.5;
        StudyOptions one, many;
        one.threads = 1;
        many.threads = 4;
        const StudyReport a = fpfn_study(g, envs, s, one);
        const StudyReport b = fpfn_study(g, envs, s, many);
        REQUIRE(a.rows.size() == g.row_count() * envs.size());
        REQUIRE(b.rows.size() == a.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].env_index == b.rows[i].env_index);
            CHECK(a.rows[i].sim.outcome == b.rows[i].sim.outcome);
            CHECK(a.rows[i].sim.growth_ratio == b.rows[i].sim.growth_ratio);
            CHECK(a.rows[i].spring_pass == b.rows[i].spring_pass);
        }
        for (metrics::Condition c :
             {metrics::Condition::Spring, metrics::Condition::LoadStrict, metrics::Condition::LoadThreshold}) {
            const Tally t = a.total(c);
            CHECK(t.fp + t.fn + t.tp + t.tn + a.errors == static_cast<int>(a.rows.size()));
        }
        CHECK_THROWS_AS(fpfn_study(g, {}, s), InvalidInput);
    }
}
