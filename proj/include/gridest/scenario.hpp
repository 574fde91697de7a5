#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridest/drem_estimator.hpp"
#include "gridest/metrics.hpp"
#include "gridest/model_core.hpp"
#include "gridest/truth_sim.hpp"

namespace gridest {

/// Event on the aggregated single-model scenario: a step in the aggregated
/// mechanical setpoint (outage-style) or a scheduled change of the electrical
/// load seen by the PFC units (rescheduling-style).
enum class AggEventKind { PmStep, LoadStep, LoadRamp };

struct AggEvent {
    double time;
    AggEventKind kind;
    double delta;           ///< [pu on s_b]
    double ramp_time = 0.0; ///< LoadRamp only [s]
};

struct AggScenarioSpec {
    double duration = 120.0;
    double dt = 1e-3;
    std::vector<AggEvent> events;
};

/// Integrates the aggregated two-state model through the event list and
/// emits the measurement stream plus the stepwise ground-truth trace.
ScenarioResult simulate_aggregated(const AggParams& params, const AggScenarioSpec& spec);

enum class ModelKind { Aggregated, MultiMachine };

/// One fully specified experiment: which simulator generates the truth,
/// its scenario, the estimator configuration, and the metrics window.
struct ExperimentConfig {
    ModelKind model = ModelKind::Aggregated;
    AggParams agg_params;
    AggScenarioSpec agg_scenario;
    std::vector<MachineParams> fleet;
    ScenarioSpec mm_scenario{120.0, 1e-3, {}, {}};
    EstimatorConfig estimator;
    double e_avg_t1 = -1.0; ///< negative selects the second half of the run
    double e_avg_t2 = -1.0;
    std::uint64_t seed = 0;
};

struct ExperimentResult {
    ScenarioResult truth;
    std::vector<EstimateRecord> estimates;
    std::vector<RegressorSnapshot> snapshots;
    MetricsReport report;
    TrueTheta eta_true{0.0, 0.0}; ///< from the final ground-truth point
    AggParams replay_params;      ///< aggregated equivalent used for replays
    ReplayResult replay_nominal;
    ReplayResult replay_estimated;
    bool divergence_warned = false;
};

/// Presets shipping the paper-style nominal configuration.
/// Known names: nominal-outage, multimachine-outage, rescheduling.
ExperimentConfig preset_config(const std::string& name, std::uint64_t seed = 0);

/// Simulate, estimate, and compute metrics in one pass.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes samples/truth/estimates CSVs, the metrics report (JSON), and the
/// per-figure plot-data CSVs into out_dir.
void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                              const std::string& out_dir);

/// JSON config round-trip (named sections mirroring the typed records).
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

} // namespace gridest
