// Command-line front end: scenario simulation, estimation over CSV streams,
// end-to-end runs with metrics and plot-data export, and replay comparison.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridest/csv_io.hpp"
#include "gridest/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gridest;

// Exit codes: 1 usage/config, 2 I/O, 3 simulation, 4 estimation.
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitSim = 3;
constexpr int kExitEst = 4;

std::string default_out_dir() {
    if (const char* env = std::getenv("GRIDEST_OUT_DIR")) return env;
    return "out";
}

struct EstimatorFlags {
    double alpha = -1.0, d = -1.0, gamma1 = -1.0, gamma2 = -1.0, dt = -1.0;
    double warmup = -2.0, y_guard = -1.0, eta1_init = -1.0, eta2_init = -1.0;
    std::string pfc_source;

    void add_to(CLI::App* app) {
        app->add_option("--alpha", alpha, "regression filter pole [1/s]");
        app->add_option("--delay", d, "delay operator length [s]");
        app->add_option("--gamma1", gamma1, "gradient gain, eta1 channel");
        app->add_option("--gamma2", gamma2, "gradient gain, eta2 channel");
        app->add_option("--dt", dt, "sample period [s]");
        app->add_option("--warmup", warmup, "warm-up gate [s] (default d + 5/alpha)");
        app->add_option("--y-guard", y_guard, "frequency validity guard [pu]");
        app->add_option("--eta1-init", eta1_init, "initial eta1 estimate");
        app->add_option("--eta2-init", eta2_init, "initial eta2 estimate");
        app->add_option("--pfc-source", pfc_source, "'measured' or 'reconstructed'")
            ->check(CLI::IsMember({"measured", "reconstructed"}));
    }

    void apply(EstimatorConfig& c) const {
        if (alpha > 0.0) c.alpha = alpha;
        if (d > 0.0) c.d = d;
        if (gamma1 > 0.0) c.gamma1 = gamma1;
        if (gamma2 > 0.0) c.gamma2 = gamma2;
        if (dt > 0.0) c.dt = dt;
        if (warmup >= -1.0 && warmup != -2.0) c.warmup = warmup;
        if (y_guard > 0.0) c.y_guard = y_guard;
        if (eta1_init >= 0.0) c.eta1_init = eta1_init;
        if (eta2_init >= 0.0) c.eta2_init = eta2_init;
        if (pfc_source == "measured") c.pfc_source = PfcSource::Measured;
        if (pfc_source == "reconstructed") c.pfc_source = PfcSource::Reconstructed;
    }
};

void print_report(const ExperimentResult& res) {
    std::printf("final relative error: eta1 %.4f%%  eta2 %.4f%%\n",
                100.0 * res.report.final_rel_err[0], 100.0 * res.report.final_rel_err[1]);
    std::printf("e_avg: %.4f\n", res.report.e_avg);
    std::printf("H_tot: true %.4f s, estimated %.4f s\n", res.truth.truth.back().h_tot,
                res.estimates.back().h_tot_hat);
    std::printf("P_m,PFC: true %.5f pu, estimated %.5f pu\n", res.truth.truth.back().p_m_pfc,
                res.estimates.back().p_m_pfc_hat);
    std::printf("|Delta_T|_L2: %.3e\n", res.report.delta_l2_final);
    std::printf("replay |df|_inf [mHz]: nominal-H %.4f, estimated-H %.4f\n",
                res.report.delta_f_max_nominal, res.report.delta_f_max_estimated);
    std::printf("estimator runtime: %.2f s%s\n", res.report.runtime_s,
                res.divergence_warned ? "  (warning: gradient step crossed stability bound)" : "");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DREM-based online power-system inertia estimation toolkit"};
    app.require_subcommand(1);

    std::string config_path, preset, input_path, truth_path, out_dir = default_out_dir();
    std::string freq_unit = "auto";
    std::uint64_t seed = 0;
    double h_nominal = -1.0, h_estimated = -1.0;
    EstimatorFlags est_flags;

    auto* sim = app.add_subcommand("simulate", "run a scenario and write the ground-truth stream");
    sim->add_option("--config", config_path, "experiment config (JSON)");
    sim->add_option("--preset", preset, "nominal-outage | multimachine-outage | rescheduling");
    sim->add_option("--seed", seed, "seed for fleet heterogeneity and noise");
    sim->add_option("-o,--out-dir", out_dir, "output directory");

    auto* est = app.add_subcommand("estimate", "run the estimator over a measurement CSV");
    est->add_option("--input", input_path, "samples CSV (t,f_av,p_pfc_tot,p_e_pfc)")->required();
    est->add_option("--truth", truth_path, "optional ground-truth CSV for metrics");
    est->add_option("--config", config_path, "experiment config (JSON)");
    est->add_option("--freq-unit", freq_unit, "pu | hz | auto")
        ->check(CLI::IsMember({"pu", "hz", "auto"}));
    est->add_option("-o,--out-dir", out_dir, "output directory");
    est_flags.add_to(est);

    auto* run = app.add_subcommand("run-scenario", "simulate, estimate, and export metrics");
    run->add_option("--config", config_path, "experiment config (JSON)");
    run->add_option("--preset", preset, "nominal-outage | multimachine-outage | rescheduling");
    run->add_option("--seed", seed, "seed for fleet heterogeneity and noise");
    run->add_option("-o,--out-dir", out_dir, "output directory");
    EstimatorFlags run_flags;
    run_flags.add_to(run);

    auto* rep = app.add_subcommand("replay-metrics", "frequency-deviation replay comparison");
    rep->add_option("--input", input_path, "samples CSV")->required();
    rep->add_option("--truth", truth_path, "ground-truth CSV (t,h_tot,p_m_pfc)")->required();
    rep->add_option("--h-nominal", h_nominal, "nominal inertia constant [s]")->required();
    rep->add_option("--h-estimated", h_estimated, "estimated inertia constant [s]")->required();
    rep->add_option("--config", config_path, "experiment config (JSON, aggregated section)");
    rep->add_option("-o,--out-dir", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else if (!preset.empty()) {
            cfg = preset_config(preset, seed);
        }
        if (cfg.seed == 0) cfg.seed = seed;

        if (sim->parsed()) {
            if (config_path.empty() && preset.empty()) {
                std::cerr << "simulate: need --config or --preset\n";
                return kExitConfig;
            }
            ScenarioResult truth = cfg.model == ModelKind::Aggregated
                                       ? simulate_aggregated(cfg.agg_params, cfg.agg_scenario)
                                       : simulate_scenario(cfg.fleet.empty()
                                                               ? default_fleet(cfg.seed)
                                                               : cfg.fleet,
                                                           cfg.mm_scenario);
            fs::create_directories(out_dir);
            emit_csv(truth.samples, (fs::path(out_dir) / "samples.csv").string());
            emit_truth_csv(truth.truth, (fs::path(out_dir) / "truth.csv").string());
            std::printf("wrote %zu samples to %s\n", truth.samples.size(), out_dir.c_str());
        } else if (est->parsed()) {
            est_flags.apply(cfg.estimator);
            const FreqUnit unit = freq_unit == "pu"   ? FreqUnit::Pu
                                  : freq_unit == "hz" ? FreqUnit::Hz
                                                      : FreqUnit::Auto;
            auto stream = ingest_csv(input_path, cfg.agg_params, unit);
            if (stream.size() > 1) cfg.estimator.dt = stream[1].t - stream[0].t;
            if (cfg.estimator.eta1_init == 0.0 && cfg.estimator.eta2_init == 0.0) {
                const TrueTheta nominal = TrueTheta::from(cfg.agg_params);
                cfg.estimator.eta1_init = 0.3 * nominal.eta1;
                cfg.estimator.eta2_init = 0.2 * nominal.eta2;
            }
            auto trace = run_estimator(stream, cfg.estimator, cfg.agg_params);
            fs::create_directories(out_dir);
            emit_estimates_csv(trace, (fs::path(out_dir) / "estimates.csv").string());
            std::printf("final estimates: eta1 %.5f, eta2 %.5f, H %.4f s, P_m %.5f pu\n",
                        trace.back().eta1_hat, trace.back().eta2_hat, trace.back().h_tot_hat,
                        trace.back().p_m_pfc_hat);
            if (!truth_path.empty()) {
                auto truth = ingest_truth_csv(truth_path);
                const TrueTheta eta_true{1.0 / truth.back().h_tot,
                                         truth.back().p_m_pfc / truth.back().h_tot};
                const auto errs = final_relative_errors(trace, eta_true);
                std::printf("final relative error: eta1 %.4f%%  eta2 %.4f%%\n", 100.0 * errs[0],
                            100.0 * errs[1]);
            }
        } else if (run->parsed()) {
            if (config_path.empty() && preset.empty()) {
                std::cerr << "run-scenario: need --config or --preset\n";
                return kExitConfig;
            }
            run_flags.apply(cfg.estimator);
            auto result = run_experiment(cfg);
            write_experiment_outputs(result, cfg, out_dir);
            print_report(result);
            std::printf("outputs written to %s\n", out_dir.c_str());
        } else if (rep->parsed()) {
            auto stream = ingest_csv(input_path, cfg.agg_params, FreqUnit::Auto);
            auto truth = ingest_truth_csv(truth_path);
            auto nominal = metric_freq_replay(stream, truth, h_nominal, cfg.agg_params);
            auto estimated = metric_freq_replay(stream, truth, h_estimated, cfg.agg_params);
            fs::create_directories(out_dir);
            emit_columns_csv((fs::path(out_dir) / "fig_delta_f.csv").string(),
                             {"t", "delta_f_nominal_mhz", "delta_f_estimated_mhz"},
                             {nominal.t, nominal.delta_f_mhz, estimated.delta_f_mhz});
            std::printf("%-14s %-12s %s\n", "candidate", "H [s]", "|df|_inf [mHz]");
            std::printf("%-14s %-12.4f %.4f\n", "nominal", h_nominal, nominal.inf_norm_mhz);
            std::printf("%-14s %-12.4f %.4f\n", "estimated", h_estimated, estimated.inf_norm_mhz);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FrequencyCollapseError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSim;
    } catch (const EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEst;
    }
    return 0;
}
