#pragma once

#include <array>
#include <vector>

#include "gridest/drem_estimator.hpp"
#include "gridest/model_core.hpp"
#include "gridest/truth_sim.hpp"

namespace gridest {

struct MetricsReport {
    std::array<double, 2> final_rel_err = {0.0, 0.0}; ///< |eta_hat_i/eta_i - 1| at stream end
    double e_avg = 0.0;            ///< time-averaged relative error over the window
    double delta_f_max_nominal = 0.0;   ///< max |delta f| [mHz], nominal-H replay
    double delta_f_max_estimated = 0.0; ///< max |delta f| [mHz], estimated-H replay
    double delta_l2_final = 0.0;
    double runtime_s = 0.0;
};

/// Per-component final relative errors of the last record against eta_true.
std::array<double, 2> final_relative_errors(const std::vector<EstimateRecord>& trace,
                                            const TrueTheta& eta_true);

/// Maximum over components of the time-averaged relative estimation error
/// over [t1, t2], rectangle rule on the recorded trace.
double metric_e_avg(const std::vector<EstimateRecord>& trace, const TrueTheta& eta_true, double t1,
                    double t2);

struct ReplayResult {
    std::vector<double> t;
    std::vector<double> delta_f_mhz; ///< replayed minus recorded frequency [mHz]
    double inf_norm_mhz = 0.0;
};

/// Replays the aggregated frequency dynamics under a candidate inertia using
/// the recorded P_m,PFC and P_e,PFC series (P_PFC,tot modeled by the TGOV1
/// lead-lag), and returns the frequency deviation against the recorded
/// average frequency in mHz.
ReplayResult metric_freq_replay(const std::vector<Sample>& stream,
                                const std::vector<TruthPoint>& truth, double h_candidate,
                                const AggParams& params);

} // namespace gridest
