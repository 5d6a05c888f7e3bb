#pragma once

// Frequency-sweep passivity tests for one-port impedances and admittances,
// the closed-form load-port real part for the no-DOB loop, and a sampled
// passivity observer.

#include <span>
#include <vector>

#include "seaz/lti.hpp"
#include "seaz/sea_model.hpp"

namespace seaz::passivity {

using lti::Complex;
using lti::FrequencyGrid;
using lti::Polynomial;
using lti::RationalTF;

struct PassivityVerdict {
    bool passive = false;
    double min_real = 0.0;
    double argmin_omega = 0.0;
    int unstable_poles = 0;
    int singular_samples = 0;
    // Imaginary-axis poles that are repeated or have a residue with negative real part.
    int bad_axis_poles = 0;
};

struct SweepOptions {
    double omega_lo = 1e-3;
    double omega_hi = 1e6;
    std::size_t points_per_decade = 400;
    bool refine = true;
};

// Default analysis grid, augmented with the natural frequencies of the
// poles and zeros of g so narrow resonances are not stepped over.
FrequencyGrid analysis_grid(const RationalTF& g, const SweepOptions& opt = {});

double default_tolerance(const model::PlantParams& p);  // 1e-9 * K

PassivityVerdict positive_real_margin(const RationalTF& z, const FrequencyGrid& grid, double tol,
                                      bool refine = true);
PassivityVerdict positive_real_margin(const RationalTF& z, double tol, const SweepOptions& opt = {});

enum class LoadVariant { StrictAdmittance, DampingThreshold };

// StrictAdmittance: Y_l = L/(1 + L Z_s) stable and Re{Y_l} >= -tol |Y_l|^2,
// which is Re{Z_l} >= -tol; min_real reports min Re{Z_l}.
// DampingThreshold: Z_l and Y_l stable and Re{Z_l} >= B_l - tol; min_real
// reports min Re{Z_l} - B_l.
PassivityVerdict load_port_condition(const RationalTF& z_s, const model::PlantParams& p, LoadVariant variant,
                                     const FrequencyGrid& grid, double tol, bool refine = true);
PassivityVerdict load_port_condition(const RationalTF& z_s, const model::PlantParams& p, LoadVariant variant,
                                     double tol, const SweepOptions& opt = {});

// Re{Z_l} = (c4 w^4 + c2 w^2 + c0) / denominator(w^2) for the no-DOB loop with I = 0, C_ff = 0.
struct RezlCoefficients {
    double c4 = 0.0;
    double c2 = 0.0;
    double c0 = 0.0;
    Polynomial denominator;  // in powers of w^2

    double evaluate(double omega) const;
};

// Coefficients from expanding Re{Z_s + J_l s + B_l}; normalized so c4 = B_l J_m.
RezlCoefficients rezl_coefficients(const model::PlantParams& p, const model::ControllerGains& g);

// Coefficients and denominator exactly as typeset in the source article.
RezlCoefficients rezl_coefficients_printed(const model::PlantParams& p, const model::ControllerGains& g);

// Least-squares fit of c4, c2, c0 against numeric Re{Z_l} samples on the given
// frequencies, holding the expanded denominator fixed.
RezlCoefficients rezl_coefficients_fit(const model::PlantParams& p, const model::ControllerGains& g,
                                       std::span<const double> omegas);

struct RezlEvaluation {
    double closed_form = 0.0;  // re-derived coefficients
    double printed = 0.0;      // typeset coefficients
    double numeric = 0.0;      // Re{Z_l(j w)} from the assembled port
};

RezlEvaluation rezl_closed_form_no_dob(const model::PlantParams& p, const model::ControllerGains& g,
                                       double omega);

struct EnergyLedger {
    std::vector<double> time;
    std::vector<double> energy;
    double min_energy = 0.0;
    double tol_energy = 0.0;
    bool violation = false;
};

// energy[k] = sign * dt * sum_{i<=k} torque[i] velocity[i]. A negative
// tol_energy selects 1e-6 * max|energy|.
EnergyLedger passivity_observer(std::span<const double> torque, std::span<const double> velocity, double dt,
                                double tol_energy = -1.0, double sign = 1.0);

}  // namespace seaz::passivity
