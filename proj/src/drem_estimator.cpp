#include "gridest/drem_estimator.hpp"

#include <cmath>
#include <string>

namespace gridest {

void EstimatorConfig::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("EstimatorConfig: alpha must be > 0");
    if (!(d > 0.0)) throw ConfigError("EstimatorConfig: d must be > 0");
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw ConfigError("EstimatorConfig: gains must be > 0");
    if (!(dt > 0.0)) throw ConfigError("EstimatorConfig: dt must be > 0");
    if (!(y_guard > 0.0)) throw ConfigError("EstimatorConfig: y_guard must be > 0");
    const double ratio = d / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw ConfigError("EstimatorConfig: d must be an integer multiple of dt");
    }
    if (effective_warmup() < d) throw ConfigError("EstimatorConfig: warmup must be >= d");
}

void mix_regression(RegressorSnapshot& snap) {
    snap.delta = snap.xi2 * snap.xi3_f - snap.xi3 * snap.xi2_f;
    snap.z_mix1 = snap.xi3_f * snap.z - snap.xi3 * snap.z_f;
    snap.z_mix2 = snap.xi2 * snap.z_f - snap.xi2_f * snap.z;
}

bool gradient_update(double& eta1, double& eta2, const RegressorSnapshot& snap,
                     const EstimatorConfig& config) {
    if (snap.delta == 0.0) return false;
    const double d2 = snap.delta * snap.delta;
    const bool unstable =
        config.gamma1 * d2 * config.dt > 2.0 || config.gamma2 * d2 * config.dt > 2.0;
    eta1 += config.dt * config.gamma1 * snap.delta * (snap.z_mix1 - snap.delta * eta1);
    eta2 += config.dt * config.gamma2 * snap.delta * (snap.z_mix2 - snap.delta * eta2);
    return unstable;
}

std::pair<double, double> recover_parameters(double eta1_hat, double eta2_hat, double eps_div) {
    if (!(eta1_hat > eps_div)) {
        throw EstimationError("recover_parameters: eta1 = " + std::to_string(eta1_hat) +
                              " not yet identifiable");
    }
    return {1.0 / eta1_hat, eta2_hat / eta1_hat};
}

DremEstimator::DremEstimator(const EstimatorConfig& config, const AggParams& params)
    : config_(config),
      params_(params),
      b1_(params.b1()),
      dd_z_(config.alpha),
      lp_xi2_(config.alpha),
      lp_xi3_(config.alpha),
      delay_z_(config.d, config.dt),
      delay_xi2_(config.d, config.dt),
      delay_xi3_(config.d, config.dt),
      eta1_hat_(config.eta1_init),
      eta2_hat_(config.eta2_init) {
    config_.validate();
    params_.validate();
}

double DremEstimator::delta_l2() const { return std::sqrt(delta_sq_integral_); }

EstimateRecord DremEstimator::step(const Sample& sample) {
    if (last_t_) {
        const double spacing = sample.t - *last_t_;
        if (std::abs(spacing - config_.dt) > 1e-9) {
            throw EstimationError("DremEstimator: sample spacing " + std::to_string(spacing) +
                                  " does not match dt = " + std::to_string(config_.dt));
        }
    }
    last_t_ = sample.t;

    const double y = sample.omega_av;
    if (std::abs(y) < config_.y_guard) {
        throw FrequencyCollapseError("DremEstimator: |omega_av| below guard at t = " +
                                     std::to_string(sample.t));
    }

    double x = sample.p_pfc_tot;
    if (config_.pfc_source == PfcSource::Reconstructed) {
        // TGOV1 reconstruction from omega_av; exact ZOH update of the scalar
        // lag state with the frequency held over the sample interval.
        const double u_g = -params_.k_p * (y - params_.omega0);
        x = (params_.t_z / params_.t_p) * u_g + gov_state_;
        const double decay = std::exp(-config_.dt / params_.t_p);
        gov_state_ = decay * gov_state_ + (1.0 - decay) * (1.0 - params_.t_z / params_.t_p) * u_g;
    }

    snap_.t = sample.t;
    snap_.z = dd_z_.step(y, config_.dt);
    snap_.xi2 = lp_xi2_.step(b1_ * (x - sample.p_e_pfc) / y, config_.dt);
    snap_.xi3 = lp_xi3_.step(b1_ / y, config_.dt);
    snap_.z_f = delay_z_.step(snap_.z);
    snap_.xi2_f = delay_xi2_.step(snap_.xi2);
    snap_.xi3_f = delay_xi3_.step(snap_.xi3);
    mix_regression(snap_);
    snap_.warmed_up = sample.t >= config_.effective_warmup();

    delta_sq_integral_ += snap_.delta * snap_.delta * config_.dt;

    if (snap_.warmed_up) {
        if (gradient_update(eta1_hat_, eta2_hat_, snap_, config_)) divergence_warned_ = true;
    }

    EstimateRecord rec;
    rec.t = sample.t;
    rec.eta1_hat = eta1_hat_;
    rec.eta2_hat = eta2_hat_;
    rec.delta_l2 = delta_l2();
    try {
        const auto [h, pm] = recover_parameters(eta1_hat_, eta2_hat_);
        rec.h_tot_hat = h;
        rec.p_m_pfc_hat = pm;
    } catch (const EstimationError&) {
        rec.h_tot_hat = 0.0;
        rec.p_m_pfc_hat = 0.0;
    }
    return rec;
}

std::vector<EstimateRecord> run_estimator(const std::vector<Sample>& stream,
                                          const EstimatorConfig& config, const AggParams& params,
                                          std::vector<RegressorSnapshot>* snapshots) {
    DremEstimator est(config, params);
    std::vector<EstimateRecord> out;
    out.reserve(stream.size());
    if (snapshots) snapshots->reserve(stream.size());
    for (const auto& s : stream) {
        out.push_back(est.step(s));
        if (snapshots) snapshots->push_back(est.last_snapshot());
    }
    return out;
}

} // namespace gridest
