#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gridest/model_core.hpp"
#include "gridest/signal_filters.hpp"

namespace gridest {

/// Where the estimator takes the PFC mechanical injection from: the measured
/// channel of the sample stream, or an internal TGOV1 reconstruction driven
/// by the average frequency.
enum class PfcSource { Measured, Reconstructed };

struct EstimatorConfig {
    double alpha = 1e3;   ///< regression filter pole [1/s]
    double d = 2.0;       ///< delay operator length [s]
    double gamma1 = 1e10; ///< gradient gain, eta1 channel
    double gamma2 = 1e10; ///< gradient gain, eta2 channel
    double dt = 1e-3;     ///< sample period [s]
    double warmup = -1.0; ///< [s]; negative selects the default d + 5/alpha
    double y_guard = kFrequencyGuard; ///< [pu]
    double eta1_init = 0.0;
    double eta2_init = 0.0;
    PfcSource pfc_source = PfcSource::Measured;

    double effective_warmup() const { return warmup >= 0.0 ? warmup : d + 5.0 / alpha; }
    void validate() const;
};

/// Per-step regression internals: the scalar regression (z, xi2, xi3), its
/// delayed copy, and the adjugate-mixed outputs.
struct RegressorSnapshot {
    double t = 0.0;
    double z = 0.0, xi2 = 0.0, xi3 = 0.0;
    double z_f = 0.0, xi2_f = 0.0, xi3_f = 0.0;
    double delta = 0.0;       ///< det of the extended regressor matrix
    double z_mix1 = 0.0;      ///< adjugate-mixed scalar regression, eta1 channel
    double z_mix2 = 0.0;      ///< adjugate-mixed scalar regression, eta2 channel
    bool warmed_up = false;
};

struct EstimateRecord {
    double t = 0.0;
    double eta1_hat = 0.0;
    double eta2_hat = 0.0;
    double h_tot_hat = 0.0;   ///< 1/eta1_hat, or 0 while not identifiable
    double p_m_pfc_hat = 0.0; ///< eta2_hat/eta1_hat, or 0 while not identifiable
    double delta_l2 = 0.0;    ///< running truncated L2-norm of delta
};

/// Adjugate mixing of the extended 2x2 regression: from the current and
/// delayed regressor rows, produce the determinant and the two decoupled
/// scalar regressions Z = adj(Phi)*(z, z_f).
void mix_regression(RegressorSnapshot& snap);

/// One explicit-Euler gradient step per channel:
/// eta_i <- eta_i + dt*gamma_i*delta*(Z_i - delta*eta_i). A zero determinant
/// leaves the estimates untouched. Returns true if the step size crossed the
/// instability bound gamma_i*delta^2*dt > 2.
bool gradient_update(double& eta1, double& eta2, const RegressorSnapshot& snap,
                     const EstimatorConfig& config);

/// H = 1/eta1, P_m = eta2/eta1. Throws EstimationError while eta1 is below
/// eps_div (not yet identifiable).
std::pair<double, double> recover_parameters(double eta1_hat, double eta2_hat,
                                             double eps_div = 1e-6);

/// Streaming DREM estimator: regression construction, delay extension,
/// adjugate mixing, and two decoupled gradient estimators, fed one sample at
/// a time with constant memory. One instance must not be shared across
/// threads; instances are independent.
class DremEstimator {
public:
    DremEstimator(const EstimatorConfig& config, const AggParams& params);

    /// Processes one measurement sample; samples must arrive at uniform
    /// config.dt spacing.
    EstimateRecord step(const Sample& sample);

    const RegressorSnapshot& last_snapshot() const { return snap_; }
    double delta_l2() const;
    bool divergence_warned() const { return divergence_warned_; }
    const EstimatorConfig& config() const { return config_; }

private:
    EstimatorConfig config_;
    AggParams params_;
    double b1_;
    DirtyDerivative dd_z_;
    LowPassFilter lp_xi2_;
    LowPassFilter lp_xi3_;
    DelayLine delay_z_;
    DelayLine delay_xi2_;
    DelayLine delay_xi3_;
    RegressorSnapshot snap_;
    double eta1_hat_;
    double eta2_hat_;
    double delta_sq_integral_ = 0.0;
    double gov_state_ = 0.0; ///< TGOV1 reconstruction state (Reconstructed mode)
    std::optional<double> last_t_;
    bool divergence_warned_ = false;
};

/// Batch convenience: run the whole stream through a fresh estimator.
/// Optionally records the regressor trace alongside the estimates.
std::vector<EstimateRecord> run_estimator(const std::vector<Sample>& stream,
                                          const EstimatorConfig& config, const AggParams& params,
                                          std::vector<RegressorSnapshot>* snapshots = nullptr);

} // namespace gridest
