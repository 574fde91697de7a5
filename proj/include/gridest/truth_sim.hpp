#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridest/model_core.hpp"

namespace gridest {

/// Per-machine constants for the ground-truth multi-machine simulator.
struct MachineParams {
    double h_i;           ///< inertia constant [s]
    double s_bi;          ///< power rating [MW]
    double p_mi;          ///< mechanical setpoint [pu on s_bi]
    double k_i = 0.0;     ///< droop gain [pu]; 0 for non-PFC units
    double t_pi = 12.983; ///< governor lag [s]
    double t_zi = 6.0;    ///< governor lead [s]
    bool is_pfc = false;
    double k_sync = 2.0;  ///< synchronizing coupling coefficient to the COI angle

    void validate() const;
};

enum class EventKind { Outage, LoadStep, RescheduleRamp };

struct ScenarioEvent {
    double time;         ///< [s], strictly inside (0, duration)
    EventKind kind;
    std::size_t machine = 0; ///< outage / reschedule target
    double delta_p = 0.0;    ///< load step or reschedule magnitude [pu on system base]
    double ramp_time = 0.0;  ///< reschedule ramp duration [s]
};

struct NoiseSpec {
    double std_omega = 0.0;
    double std_p_pfc = 0.0;
    double std_p_e = 0.0;
    std::uint64_t seed = 0;
};

struct ScenarioSpec {
    double duration; ///< [s]
    double dt;       ///< [s]
    std::vector<ScenarioEvent> events;
    std::optional<NoiseSpec> noise;

    void validate(std::size_t n_machines) const;
};

/// Ground-truth parameter values at one instant; emitted stepwise as events
/// change the surviving fleet.
struct TruthPoint {
    double t;
    double h_tot;   ///< [s], over active machines
    double p_m_pfc; ///< [pu on active system base]
};

struct ScenarioResult {
    std::vector<Sample> samples;
    std::vector<TruthPoint> truth;
};

/// Inertia-and-rating weighted mean speed over the given machines (Eq-style
/// COI with per-unit machine constants converted to a common base).
double compute_coi(const std::vector<double>& speeds, const std::vector<MachineParams>& machines);

/// H_tot = sum(H_i*S_Bi)/sum(S_Bi) over all given machines.
double compute_h_tot(const std::vector<MachineParams>& machines);

/// Unweighted mean over PFC machine speeds.
double compute_avg_freq(const std::vector<double>& speeds, const std::vector<MachineParams>& machines);

/// Aggregated PFC mechanical setpoint on the system base sum(S_Bi).
double compute_p_m_pfc(const std::vector<MachineParams>& machines);

/// Integrates the multi-machine fleet through a scenario and emits the
/// measurement stream together with the stepwise ground-truth trace.
ScenarioResult simulate_scenario(const std::vector<MachineParams>& machines,
                                 const ScenarioSpec& spec);

/// Default desk-scale fleet: 10 machines (8 PFC, 2 not), heterogeneous
/// inertias in [2.5, 6] s, scaled so H_tot and the total droop match the
/// aggregated defaults. Heterogeneity is drawn deterministically from seed.
std::vector<MachineParams> default_fleet(std::uint64_t seed = 0);

/// Aggregated equivalent (h_tot, k_p, p_m_pfc from the fleet sums) for
/// replays and homogeneity checks.
AggParams aggregate_fleet(const std::vector<MachineParams>& machines, const AggParams& base = {});

} // namespace gridest
