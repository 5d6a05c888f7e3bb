#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seaz/error.hpp"
#include "seaz/metrics.hpp"
#include "seaz/passivity.hpp"

using namespace seaz;
using namespace seaz::passivity;
using model::Architecture;
using model::SeaConfig;

namespace {

const Architecture kArchs[] = {Architecture::NoDob, Architecture::Dobm, Architecture::Dobt};

double tol_of(const SeaConfig& c) { return default_tolerance(c.plant); }

}  // namespace

TEST_SUITE("passivity") {
    TEST_CASE("s + 1 is passive with margin 1") {
        const RationalTF z(Polynomial{1.0, 1.0}, Polynomial{1.0});
        const auto v = positive_real_margin(z, 1e-9);
        CHECK(v.passive);
        CHECK(v.min_real == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("(s - 1)/(s + 1) is not passive") {
        const RationalTF z(Polynomial{-1.0, 1.0}, Polynomial{1.0, 1.0});
        const auto v = positive_real_margin(z, 1e-9);
        CHECK_FALSE(v.passive);
        CHECK(v.min_real < -0.99);
        CHECK(v.argmin_omega < 1e-2);
    }

    TEST_CASE("pure spring is lossless") {
        const RationalTF z(Polynomial{141350.0}, Polynomial{0.0, 1.0});
        const auto v = positive_real_margin(z, 1e-9 * 141350.0);
        CHECK(v.passive);
        CHECK(std::abs(v.min_real) < 1e-9);
        CHECK(v.bad_axis_poles == 0);
    }

    TEST_CASE("unstable and badly placed axis poles fail") {
        const auto unstable = positive_real_margin(RationalTF(Polynomial{1.0}, Polynomial{-1.0, 1.0}), 1e-9);
        CHECK_FALSE(unstable.passive);
        CHECK(unstable.unstable_poles == 1);
        const auto double_int = positive_real_margin(RationalTF(Polynomial{1.0}, Polynomial{0.0, 0.0, 1.0}), 1e-9);
        CHECK_FALSE(double_int.passive);
        CHECK(double_int.bad_axis_poles > 0);
        const auto negative_int = positive_real_margin(RationalTF(Polynomial{-1.0}, Polynomial{0.0, 1.0}), 1e-9);
        CHECK_FALSE(negative_int.passive);
    }

    TEST_CASE("narrow dips between grid points are found") {
        // 1 - 1.5 * band-pass with zeta = 1e-3: the real part dips to -0.5 only near 1234 rad/s.
        const double w0 = 1234.0, z = 1e-3;
        const RationalTF bp(Polynomial{0.0, 2.0 * z * w0}, Polynomial{w0 * w0, 2.0 * z * w0, 1.0});
        const RationalTF zt = RationalTF(1.0) - RationalTF(1.5) * bp;
        const auto v = positive_real_margin(zt, analysis_grid(zt, {1e-3, 1e6, 5, true}), 1e-9, true);
        CHECK(v.min_real == doctest::Approx(-0.5).epsilon(1e-6));
        CHECK_FALSE(v.passive);
        CHECK(v.argmin_omega == doctest::Approx(w0).epsilon(1e-2));
    }

    TEST_CASE("undamped load makes the strict load test equal the spring test") {
        std::mt19937 rng(3);
        for (Architecture a : kArchs) {
            for (int trial = 0; trial < 6; ++trial) {
                SeaConfig c = oracle::random_config(rng, a);
                c.plant.B_l = 0.0;
                const auto zs = model::spring_port(c).Z_s;
                const auto spring = positive_real_margin(zs, tol_of(c));
                const auto load = load_port_condition(zs, c.plant, LoadVariant::StrictAdmittance, tol_of(c));
                CHECK(spring.passive == load.passive);
                CHECK(load.min_real == doctest::Approx(spring.min_real).epsilon(1e-6).scale(c.plant.K * 1e-9));
            }
        }
    }

    TEST_CASE("load test brackets the load-limited stiffness") {
        SeaConfig c;
        c.ff = model::FeedforwardKind::Zero;
        const auto r = metrics::max_safe_stiffness(c, metrics::Condition::LoadStrict);
        const auto check = [&](double k) {
            SeaConfig x = c;
            x.imp.K_imp = k;
            return load_port_condition(model::spring_port(x).Z_s, x.plant, LoadVariant::StrictAdmittance, tol_of(x))
                .passive;
        };
        CHECK(check(0.99 * r.k_max));
        CHECK_FALSE(check(r.bracket_hi * 1.01));
        CHECK(r.bracket_hi - r.bracket_lo <= r.tol_k);
    }

    TEST_CASE("load threshold is shifted by the load damping") {
        const SeaConfig c;
        const auto zs = model::spring_port(c).Z_s;
        const auto grid = analysis_grid(model::load_port(zs, c.plant).Y_l);
        const auto strict = load_port_condition(zs, c.plant, LoadVariant::StrictAdmittance, grid, tol_of(c));
        const auto thresh = load_port_condition(zs, c.plant, LoadVariant::DampingThreshold, grid, tol_of(c));
        CHECK(thresh.min_real == doctest::Approx(strict.min_real - c.plant.B_l).epsilon(1e-9));
    }

    TEST_CASE("property: spring passivity implies strict load passivity") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int implied = 0;
        for (Architecture a : kArchs) {
            for (int trial = 0; trial < 15; ++trial) {
                SeaConfig c = oracle::random_config(rng, a, trial % 2 == 0);
                c.plant.J_l = 20.0 * u(rng);
                c.plant.B_l = 300.0 * u(rng);
                const auto zs = model::spring_port(c).Z_s;
                if (!positive_real_margin(zs, tol_of(c)).passive) continue;
                ++implied;
                CHECK(load_port_condition(zs, c.plant, LoadVariant::StrictAdmittance, tol_of(c)).passive);
            }
        }
        CHECK(implied > 0);
    }

    TEST_CASE("property: spring limit never exceeds the strict load limit") {
        std::mt19937 rng(19);
        int compared = 0;
        for (Architecture a : kArchs) {
            for (int trial = 0; trial < 3; ++trial) {
                SeaConfig c = oracle::random_config(rng, a);
                c.imp.K_imp = 0.0;
                double spring = 0.0;
                try {
                    spring = metrics::max_safe_stiffness(c, metrics::Condition::Spring).k_max;
                } catch (const UnsafeBaseline&) {
                    continue;
                }
                const auto load = metrics::max_safe_stiffness(c, metrics::Condition::LoadStrict);
                CHECK(spring <= load.k_max + load.tol_k);
                ++compared;
            }
        }
        CHECK(compared > 0);
    }

    TEST_CASE("closed-form real part: leading coefficient") {
        const auto r = rezl_coefficients(model::PlantParams{}, model::ControllerGains{});
        CHECK(r.c4 == 100.0 * 6.4e-6);
        CHECK(r.c4 == doctest::Approx(6.4e-4));
        CHECK(rezl_coefficients_printed(model::PlantParams{}, model::ControllerGains{}).c4 == r.c4);
    }

    TEST_CASE("closed-form real part matches the assembled load port") {
        const model::PlantParams p;
        for (const model::ControllerGains g : {model::ControllerGains{1.0, 0.01}, model::ControllerGains{5.0, 0.07},
                                              model::ControllerGains{0.2, 0.0}}) {
            const auto grid = FrequencyGrid::log_spaced(1e-1, 1e5, 20);
            for (double w : grid.points()) {
                const auto e = rezl_closed_form_no_dob(p, g, w);
                CHECK(e.closed_form == doctest::Approx(e.numeric).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("closed-form real part in the undamped, no-derivative limit") {
        model::PlantParams p;
        p.B_l = 0.0;
        const model::ControllerGains g{2.0, 0.0};
        const auto r = rezl_coefficients(p, g);
        CHECK(r.c4 == 0.0);
        CHECK(r.c2 == 0.0);
        for (double w : {0.5, 50.0, 5000.0}) {
            const auto e = rezl_closed_form_no_dob(p, g, w);
            CHECK(e.closed_form == doctest::Approx(e.numeric).epsilon(1e-7));
        }
    }

    TEST_CASE("least-squares fit recovers the expanded coefficients") {
        const model::PlantParams p;
        const model::ControllerGains g{1.0, 0.01};
        const auto grid = FrequencyGrid::log_spaced(1e-1, 1e5, 60);
        const auto fit = rezl_coefficients_fit(p, g, grid.points());
        const auto ref = rezl_coefficients(p, g);
        CHECK(fit.c4 == doctest::Approx(ref.c4).epsilon(1e-6));
        CHECK(fit.c2 == doctest::Approx(ref.c2).epsilon(1e-6));
        CHECK(fit.c0 == doctest::Approx(ref.c0).epsilon(1e-6));
        const double two[] = {1.0, 2.0};
        CHECK_THROWS_AS(rezl_coefficients_fit(p, g, two), InvalidInput);
    }

    TEST_CASE("closed form rejects a vanishing denominator") {
        RezlCoefficients r;
        r.denominator = Polynomial{-4.0, 1.0};
        CHECK_THROWS_AS(r.evaluate(2.0), SingularError);
    }

    TEST_CASE("observer: constant unit power") {
        const std::vector<double> one(1000, 1.0);
        const auto led = passivity_observer(one, one, 1e-3);
        CHECK(led.energy.back() == 1.0);
        CHECK_FALSE(led.violation);
        CHECK(led.time.size() == 1000);
    }

    TEST_CASE("observer: lossless spring stays non-negative") {
        const double dt = 1e-3;
        std::vector<double> tq, v;
        for (int k = 0; k < 20000; ++k) {
            tq.push_back(std::sin(k * dt));
            v.push_back(std::cos(k * dt));
        }
        const auto led = passivity_observer(tq, v, dt);
        CHECK_FALSE(led.violation);
        double worst = 0.0;
        for (std::size_t k = 0; k < tq.size(); ++k) {
            const double t = static_cast<double>(k) * dt;
            worst = std::max(worst, std::abs(led.energy[k] - 0.5 * std::pow(std::sin(t), 2)));
        }
        CHECK(worst < 1e-3);
    }

    TEST_CASE("observer: active source is flagged") {
        std::vector<double> tq, v;
        for (int k = 1; k <= 500; ++k) {
            tq.push_back(0.01 * k);
            v.push_back(-0.01 * k);
        }
        const auto led = passivity_observer(tq, v, 1e-3);
        CHECK(led.violation);
        for (std::size_t k = 1; k < led.energy.size(); ++k) CHECK(led.energy[k] < led.energy[k - 1]);
        CHECK_FALSE(passivity_observer(tq, v, 1e-3, -1.0, -1.0).violation);
    }

    TEST_CASE("observer input errors") {
        const std::vector<double> a(3, 1.0), b(4, 1.0);
        CHECK_THROWS_AS(passivity_observer(a, b, 1e-3), InvalidInput);
        CHECK_THROWS_AS(passivity_observer(a, a, 0.0), InvalidInput);
    }
}
