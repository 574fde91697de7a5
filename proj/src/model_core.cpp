#include "gridest/model_core.hpp"

#include <cmath>
#include <string>

namespace gridest {

void AggParams::validate() const {
    if (!(s_b > 0.0)) throw ConfigError("AggParams: s_b must be > 0");
    if (!(h_tot > 0.0)) throw ConfigError("AggParams: h_tot must be > 0");
    if (!(t_p > 0.0)) throw ConfigError("AggParams: t_p must be > 0");
    if (!(t_z >= 0.0)) throw ConfigError("AggParams: t_z must be >= 0");
    if (!(t_z < t_p)) throw ConfigError("AggParams: lead-lag requires t_z < t_p");
    if (!(omega0 > 0.0)) throw ConfigError("AggParams: omega0 must be > 0");
    if (!(k_p >= 0.0)) throw ConfigError("AggParams: k_p must be >= 0");
    if (!(f_nom > 0.0)) throw ConfigError("AggParams: f_nom must be > 0");
}

double governor_output(const AggState& state, const AggParams& params) {
    const double u_g = -params.k_p * (state.omega_av - params.omega0);
    return (params.t_z / params.t_p) * u_g + state.g_state;
}

double governor_state_derivative(const AggState& state, const AggParams& params) {
    const double u_g = -params.k_p * (state.omega_av - params.omega0);
    return ((1.0 - params.t_z / params.t_p) * u_g - state.g_state) / params.t_p;
}

double agg_derivative(const AggState& state, double p_e_pfc, const TrueTheta& theta,
                      const AggParams& params) {
    const double y = state.omega_av;
    if (std::abs(y) < kFrequencyGuard) {
        throw FrequencyCollapseError("agg_derivative: |omega_av| = " + std::to_string(std::abs(y)) +
                                     " below guard " + std::to_string(kFrequencyGuard));
    }
    const double x = governor_output(state, params);
    return theta.eta1 * state.b1 * (x - p_e_pfc) / y + theta.eta2 * state.b1 / y;
}

namespace {

struct Deriv {
    double d_omega;
    double d_g;
};

Deriv rhs(const AggState& s, double p_e_pfc, const TrueTheta& theta, const AggParams& params) {
    return {agg_derivative(s, p_e_pfc, theta, params), governor_state_derivative(s, params)};
}

} // namespace

AggState step_aggregated(const AggState& state, double p_e_pfc, const TrueTheta& theta,
                         const AggParams& params, double dt) {
    if (!(dt > 0.0)) throw ConfigError("step_aggregated: dt must be > 0");

    auto advance = [&](const AggState& s, const Deriv& k, double h) {
        return AggState{s.omega_av + h * k.d_omega, s.g_state + h * k.d_g, s.b1};
    };

    const Deriv k1 = rhs(state, p_e_pfc, theta, params);
    const Deriv k2 = rhs(advance(state, k1, 0.5 * dt), p_e_pfc, theta, params);
    const Deriv k3 = rhs(advance(state, k2, 0.5 * dt), p_e_pfc, theta, params);
    const Deriv k4 = rhs(advance(state, k3, dt), p_e_pfc, theta, params);

    AggState next = state;
    next.omega_av += dt / 6.0 * (k1.d_omega + 2.0 * k2.d_omega + 2.0 * k3.d_omega + k4.d_omega);
    next.g_state += dt / 6.0 * (k1.d_g + 2.0 * k2.d_g + 2.0 * k3.d_g + k4.d_g);
    return next;
}

} // namespace gridest
