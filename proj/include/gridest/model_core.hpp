#pragma once

#include <vector>

#include "gridest/errors.hpp"

namespace gridest {

/// Below this average-frequency magnitude [pu] the 1/omega terms are
/// meaningless and the simulation is aborted.
inline constexpr double kFrequencyGuard = 0.1;

/// Aggregated system constants. Powers are per-unit on s_b, frequencies in
/// per-unit of omega0; Hz appears only in outputs via f_nom.
struct AggParams {
    double s_b = 570892.0;  ///< total power rating [MW]
    double h_tot = 3.665;   ///< total inertia constant [s]
    double omega0 = 1.0;    ///< nominal frequency [pu]
    double k_p = 2.495;     ///< total droop gain [pu]
    double p_m_pfc = 0.498; ///< aggregated PFC mechanical setpoint [pu]
    double t_p = 12.983;    ///< governor lag time constant [s]
    double t_z = 6.0;       ///< governor lead time constant [s]
    double f_nom = 50.0;    ///< nominal frequency for Hz conversion [Hz]

    void validate() const;
    double b1() const { return 0.5 * omega0 * omega0; }
};

/// Reduced parameters of the aggregated swing equation.
struct TrueTheta {
    double eta1; ///< 1/H_tot [1/s]
    double eta2; ///< P_m,PFC / H_tot [pu/s]

    static TrueTheta from(const AggParams& p) { return {1.0 / p.h_tot, p.p_m_pfc / p.h_tot}; }
};

/// State of the aggregated model: average frequency plus the internal
/// governor lag state of the lead-lag realization.
struct AggState {
    double omega_av = 1.0; ///< average electrical frequency [pu]
    double g_state = 0.0;  ///< governor lag state [pu]
    double b1 = 0.5;       ///< omega0^2/2 in per-unit convention

    static AggState equilibrium(const AggParams& p) { return {p.omega0, 0.0, p.b1()}; }
};

/// One time-stamped measurement triple.
struct Sample {
    double t;         ///< time [s]
    double omega_av;  ///< [pu]
    double p_pfc_tot; ///< total PFC mechanical power injection [pu]
    double p_e_pfc;   ///< aggregated PFC electrical power [pu]
};

/// TGOV1 lead-lag (1+pT_z)/(1+pT_p) acting on -K_P*(omega_av - omega0),
/// realized with direct feedthrough T_z/T_p so no input derivative is needed.
double governor_output(const AggState& state, const AggParams& params);

/// Derivative of the internal governor state; see governor_output.
double governor_state_derivative(const AggState& state, const AggParams& params);

/// Right-hand side of the aggregated swing equation in (eta1, eta2) form:
/// d(omega_av)/dt = eta1*b1*(x-u)/y + eta2*b1/y with x the governor output.
/// Throws FrequencyCollapseError when |omega_av| < kFrequencyGuard.
double agg_derivative(const AggState& state, double p_e_pfc, const TrueTheta& theta,
                      const AggParams& params);

/// One classical 4th-order fixed step of the two-state aggregated model,
/// with p_e_pfc held constant over the step.
AggState step_aggregated(const AggState& state, double p_e_pfc, const TrueTheta& theta,
                         const AggParams& params, double dt);

inline double to_hz(double omega, const AggParams& params) { return params.f_nom * omega; }

} // namespace gridest
