#pragma once

// Z-region, DC rendered stiffness, maximum safe stiffness and parameter sweeps.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seaz/passivity.hpp"
#include "seaz/sea_model.hpp"

namespace seaz::metrics {

using model::Architecture;
using model::FeedforwardKind;
using model::ImpedanceParams;
using model::SeaConfig;

struct ZRegionConfig {
    double omega1 = 1e-2;                    // rad/s
    double eps_tail = 1e-3;
    std::optional<ImpedanceParams> I_upper;  // unset: K_imp = K, B_imp = 0
    double rel_tol = 1e-4;
    double omega_limit = 1e12;               // give up looking for the tail here

    ImpedanceParams upper(const model::PlantParams& p) const;
    void validate() const;
};

struct ZRegionResult {
    double value = 0.0;
    double omega2 = 0.0;
    std::size_t intervals = 0;
    std::vector<std::pair<double, double>> integrand;  // (omega, integrand) on the final grid
};

// ln|Z_u / Z_lower| written as the architecture's closed-form ratio.
double z_region_integrand(const SeaConfig& cfg, const ImpedanceParams& I_u, double omega);

// Same ratio evaluated from two assembled spring ports.
double z_region_integrand_from_ports(const SeaConfig& cfg, const ImpedanceParams& I_u, double omega);

ZRegionResult z_region(const SeaConfig& cfg, const ZRegionConfig& zcfg = {});

struct DcStiffness {
    double formula = 0.0;           // closed-form DC value
    double low_frequency = 0.0;     // |j w Z_s(j w)| at w = probe_omega
    double probe_omega = 1e-4;
    double rel_diff = 0.0;
    bool consistent = false;        // agreement within 0.1 %
    double disturbance_gain = 0.0;  // tau_s per unit constant d at DC
};

DcStiffness dc_rendered_stiffness(const SeaConfig& cfg);

enum class Condition { Spring, LoadStrict, LoadThreshold };

std::string_view to_string(Condition c);
Condition parse_condition(std::string_view s);

struct StiffnessOptions {
    double tol_k = -1.0;        // default 1e-3 * K
    double margin_tol = -1.0;   // default 1e-9 * K
    double cap_factor = 1e4;    // stop expanding the bracket at cap_factor * K
    int post_check_points = 10;
    passivity::SweepOptions sweep;
};

struct StiffnessResult {
    double k_max = 0.0;
    double k_max_normalized = 0.0;
    Condition condition = Condition::Spring;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double tol_k = 0.0;
    int evaluations = 0;
};

passivity::PassivityVerdict evaluate_condition(const SeaConfig& cfg, Condition c, const StiffnessOptions& opt = {});

StiffnessResult max_safe_stiffness(const SeaConfig& cfg_base, Condition c, const StiffnessOptions& opt = {});

struct SweepGrid {
    SeaConfig base;
    std::vector<double> K_p;
    std::vector<double> K_d;
    std::vector<double> omega_dob;  // rad/s
    std::vector<double> K_imp;
    std::vector<double> B_imp;
    std::vector<Architecture> arch;
    std::vector<FeedforwardKind> ff;

    // Empty axes take the base value. Row order: K_p outermost, ff innermost.
    std::vector<SeaConfig> rows() const;
    std::size_t row_count() const;
};

enum class SweepTask { MaxStiff, ZRegion, DcStiffness };

struct SweepOptions {
    Condition condition = Condition::LoadStrict;
    StiffnessOptions stiffness;
    ZRegionConfig zregion;
    unsigned threads = 0;  // 0: hardware concurrency, 1: serial
};

struct SweepRow {
    SeaConfig cfg;
    double value = 0.0;  // k_max_normalized, z-region or DC stiffness
    std::optional<StiffnessResult> stiffness;
    std::string error;   // non-empty when the row failed
};

std::vector<SweepRow> param_sweep(const SweepGrid& grid, SweepTask task, const SweepOptions& opt = {});

// Runs f(i) for i in [0, n) over a small thread pool; results land by index.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f);

}  // namespace seaz::metrics

#include "seaz/detail/parallel.hpp"
