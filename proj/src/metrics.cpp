#include "gridest/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gridest {

std::array<double, 2> final_relative_errors(const std::vector<EstimateRecord>& trace,
                                            const TrueTheta& eta_true) {
    if (trace.empty()) throw EstimationError("final_relative_errors: empty trace");
    const auto& last = trace.back();
    return {std::abs(last.eta1_hat / eta_true.eta1 - 1.0),
            std::abs(last.eta2_hat / eta_true.eta2 - 1.0)};
}

double metric_e_avg(const std::vector<EstimateRecord>& trace, const TrueTheta& eta_true, double t1,
                    double t2) {
    if (!(t2 > t1)) throw ConfigError("metric_e_avg: window must satisfy t2 > t1");
    if (trace.empty() || trace.front().t > t1 + 1e-9 || trace.back().t < t2 - 1e-9) {
        throw ConfigError("metric_e_avg: trace does not cover the window");
    }
    double int1 = 0.0, int2 = 0.0, span = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double t = trace[i].t;
        if (t <= t1 || t > t2 + 1e-9) continue;
        const double dt = t - trace[i - 1].t;
        int1 += dt * std::abs(eta_true.eta1 - trace[i].eta1_hat) / std::abs(eta_true.eta1);
        int2 += dt * std::abs(eta_true.eta2 - trace[i].eta2_hat) / std::abs(eta_true.eta2);
        span += dt;
    }
    if (span <= 0.0) throw ConfigError("metric_e_avg: empty window");
    return std::max(int1, int2) / span;
}

ReplayResult metric_freq_replay(const std::vector<Sample>& stream,
                                const std::vector<TruthPoint>& truth, double h_candidate,
                                const AggParams& params) {
    if (stream.size() < 2) throw ConfigError("metric_freq_replay: need at least two samples");
    if (truth.size() != stream.size()) {
        throw ConfigError("metric_freq_replay: truth trace must align with the sample stream");
    }
    if (!(h_candidate > 0.0)) throw ConfigError("metric_freq_replay: candidate H must be > 0");

    const double dt = stream[1].t - stream[0].t;
    AggState state = AggState::equilibrium(params);
    state.omega_av = stream[0].omega_av;

    ReplayResult res;
    res.t.reserve(stream.size());
    res.delta_f_mhz.reserve(stream.size());
    res.t.push_back(stream[0].t);
    res.delta_f_mhz.push_back(0.0);

    for (std::size_t k = 1; k < stream.size(); ++k) {
        // Inputs held over the step; eta2 follows the recorded P_m,PFC trace.
        const TrueTheta theta{1.0 / h_candidate, truth[k - 1].p_m_pfc / h_candidate};
        state = step_aggregated(state, stream[k - 1].p_e_pfc, theta, params, dt);
        const double df_mhz = 1000.0 * params.f_nom * (state.omega_av - stream[k].omega_av);
        res.t.push_back(stream[k].t);
        res.delta_f_mhz.push_back(df_mhz);
        res.inf_norm_mhz = std::max(res.inf_norm_mhz, std::abs(df_mhz));
    }
    return res;
}

} // namespace gridest
