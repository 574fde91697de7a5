#include "gridest/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gridest/csv_io.hpp"

namespace gridest {

namespace {

double load_at(const std::vector<AggEvent>& events, double base, double t) {
    double u = base;
    for (const auto& ev : events) {
        if (ev.kind == AggEventKind::LoadStep) {
            if (t >= ev.time) u += ev.delta;
        } else if (ev.kind == AggEventKind::LoadRamp) {
            if (ev.ramp_time <= 0.0) {
                if (t >= ev.time) u += ev.delta;
            } else {
                u += ev.delta * std::clamp((t - ev.time) / ev.ramp_time, 0.0, 1.0);
            }
        }
    }
    return u;
}

double p_m_at(const std::vector<AggEvent>& events, double base, double t) {
    double p = base;
    for (const auto& ev : events) {
        if (ev.kind == AggEventKind::PmStep && t >= ev.time) p += ev.delta;
    }
    return p;
}

} // namespace

ScenarioResult simulate_aggregated(const AggParams& params, const AggScenarioSpec& spec) {
    params.validate();
    if (!(spec.dt > 0.0) || !(spec.duration > 0.0)) {
        throw ConfigError("simulate_aggregated: duration and dt must be > 0");
    }
    for (const auto& ev : spec.events) {
        if (!(ev.time > 0.0) || !(ev.time < spec.duration)) {
            throw ConfigError("simulate_aggregated: event time outside (0, duration)");
        }
    }

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(spec.duration / spec.dt));
    AggState state = AggState::equilibrium(params);

    ScenarioResult result;
    result.samples.reserve(n_steps + 1);
    result.truth.reserve(n_steps + 1);

    auto emit = [&](double t) {
        const double p_m = p_m_at(spec.events, params.p_m_pfc, t);
        result.samples.push_back(
            {t, state.omega_av, governor_output(state, params), load_at(spec.events, params.p_m_pfc, t)});
        result.truth.push_back({t, params.h_tot, p_m});
    };

    emit(0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        // Inputs are held over [t, t+dt); events firing exactly at t take
        // effect on this step, matching the multi-machine simulator.
        const double p_m = p_m_at(spec.events, params.p_m_pfc, t);
        const double u = load_at(spec.events, params.p_m_pfc, t);
        const TrueTheta theta{1.0 / params.h_tot, p_m / params.h_tot};
        state = step_aggregated(state, u, theta, params, spec.dt);
        emit(static_cast<double>(k + 1) * spec.dt);
    }
    return result;
}

ExperimentConfig preset_config(const std::string& name, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    if (name == "nominal-outage") {
        // 1455 MW-equivalent setpoint step on the aggregated defaults.
        cfg.model = ModelKind::Aggregated;
        cfg.agg_scenario.duration = 120.0;
        cfg.agg_scenario.events = {{10.0, AggEventKind::PmStep, -1455.0 / cfg.agg_params.s_b, 0.0}};
    } else if (name == "multimachine-outage") {
        cfg.model = ModelKind::MultiMachine;
        cfg.fleet = default_fleet(seed);
        cfg.mm_scenario = ScenarioSpec{120.0, 1e-3, {}, {}};
        cfg.mm_scenario.events = {{10.0, EventKind::Outage, 7, 0.0, 0.0}};
        // Inter-machine swing components make delta larger than on the
        // aggregated model; the paper gains would cross the Euler stability
        // bound here.
        cfg.estimator.gamma1 = 1e8;
        cfg.estimator.gamma2 = 1e8;
    } else if (name == "rescheduling") {
        // Stepped generator/load ramps at a full-hour-style cadence, desk scale.
        cfg.model = ModelKind::Aggregated;
        cfg.agg_scenario.duration = 800.0;
        cfg.agg_scenario.events = {
            {20.0, AggEventKind::LoadRamp, 0.002, 30.0},
            {120.0, AggEventKind::LoadRamp, -0.002, 30.0},
            {300.0, AggEventKind::LoadRamp, 0.0025, 60.0},
            {450.0, AggEventKind::LoadRamp, -0.0025, 60.0},
            {600.0, AggEventKind::LoadStep, 0.0015, 0.0},
            {700.0, AggEventKind::LoadStep, -0.0015, 0.0},
        };
        cfg.e_avg_t1 = 300.0;
        cfg.e_avg_t2 = 761.0;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult res;
    if (config.model == ModelKind::Aggregated) {
        res.truth = simulate_aggregated(config.agg_params, config.agg_scenario);
        res.replay_params = config.agg_params;
    } else {
        const auto& fleet = config.fleet.empty() ? default_fleet(config.seed) : config.fleet;
        res.truth = simulate_scenario(fleet, config.mm_scenario);
        res.replay_params = aggregate_fleet(fleet, config.agg_params);
    }
    if (res.truth.samples.empty()) throw ConfigError("run_experiment: empty scenario");

    res.eta_true = TrueTheta{1.0 / res.truth.truth.back().h_tot,
                             res.truth.truth.back().p_m_pfc / res.truth.truth.back().h_tot};

    EstimatorConfig est_cfg = config.estimator;
    if (est_cfg.eta1_init == 0.0 && est_cfg.eta2_init == 0.0) {
        // Paper-style default initial condition diag(0.3, 0.2) * nominal eta.
        const TrueTheta nominal{1.0 / res.truth.truth.front().h_tot,
                                res.truth.truth.front().p_m_pfc / res.truth.truth.front().h_tot};
        est_cfg.eta1_init = 0.3 * nominal.eta1;
        est_cfg.eta2_init = 0.2 * nominal.eta2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    DremEstimator est(est_cfg, res.replay_params);
    res.estimates.reserve(res.truth.samples.size());
    res.snapshots.reserve(res.truth.samples.size());
    for (const auto& s : res.truth.samples) {
        res.estimates.push_back(est.step(s));
        res.snapshots.push_back(est.last_snapshot());
    }
    res.divergence_warned = est.divergence_warned();
    const auto t1 = std::chrono::steady_clock::now();
    res.report.runtime_s = std::chrono::duration<double>(t1 - t0).count();

    res.report.final_rel_err = final_relative_errors(res.estimates, res.eta_true);
    res.report.delta_l2_final = res.estimates.back().delta_l2;

    const double t_end = res.estimates.back().t;
    double w1 = config.e_avg_t1, w2 = config.e_avg_t2;
    if (w1 < 0.0 || w2 < 0.0 || w2 > t_end) {
        w1 = 0.5 * t_end;
        w2 = t_end;
    }
    res.report.e_avg = metric_e_avg(res.estimates, res.eta_true, w1, w2);

    const double h_nominal = res.truth.truth.back().h_tot;
    res.replay_nominal = metric_freq_replay(res.truth.samples, res.truth.truth, h_nominal,
                                            res.replay_params);
    res.report.delta_f_max_nominal = res.replay_nominal.inf_norm_mhz;
    const double h_est = res.estimates.back().h_tot_hat;
    if (h_est > 0.0) {
        res.replay_estimated = metric_freq_replay(res.truth.samples, res.truth.truth, h_est,
                                                  res.replay_params);
        res.report.delta_f_max_estimated = res.replay_estimated.inf_norm_mhz;
    }
    return res;
}

void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                              const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    emit_csv(result.truth.samples, path("samples.csv"));
    emit_truth_csv(result.truth.truth, path("truth.csv"));
    emit_estimates_csv(result.estimates, path("estimates.csv"));

    const std::size_t n = result.truth.samples.size();
    std::vector<double> t(n), f_rec(n), f_rep(n), p_meas(n), p_gov(n);
    std::vector<double> e1(n), e2(n), r1(n), r2(n), dl2(n);

    // TGOV1 reconstruction of the PFC injection from the recorded frequency.
    const AggParams& p = result.replay_params;
    double gov_state = 0.0;
    const double dt = n > 1 ? result.truth.samples[1].t - result.truth.samples[0].t : 1.0;
    const double decay = std::exp(-dt / p.t_p);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = result.truth.samples[i];
        t[i] = s.t;
        f_rec[i] = to_hz(s.omega_av, p);
        f_rep[i] = f_rec[i] + (i < result.replay_nominal.delta_f_mhz.size()
                                   ? result.replay_nominal.delta_f_mhz[i] / 1000.0
                                   : 0.0);
        p_meas[i] = s.p_pfc_tot;
        const double u_g = -p.k_p * (s.omega_av - p.omega0);
        p_gov[i] = (p.t_z / p.t_p) * u_g + gov_state;
        gov_state = decay * gov_state + (1.0 - decay) * (1.0 - p.t_z / p.t_p) * u_g;

        const auto& r = result.estimates[i];
        e1[i] = r.eta1_hat;
        e2[i] = r.eta2_hat;
        r1[i] = r.eta1_hat / result.eta_true.eta1;
        r2[i] = r.eta2_hat / result.eta_true.eta2;
        dl2[i] = r.delta_l2;
    }

    emit_columns_csv(path("fig_f_av.csv"), {"t", "f_av_recorded_hz", "f_av_replay_hz"},
                     {t, f_rec, f_rep});
    emit_columns_csv(path("fig_p_pfc.csv"), {"t", "p_pfc_measured", "p_pfc_tgov1"},
                     {t, p_meas, p_gov});
    emit_columns_csv(path("fig_eta.csv"), {"t", "eta1_hat", "eta2_hat"}, {t, e1, e2});
    emit_columns_csv(path("fig_eta_rel.csv"), {"t", "eta1_rel", "eta2_rel"}, {t, r1, r2});
    emit_columns_csv(path("fig_delta_norm.csv"), {"t", "delta_l2"}, {t, dl2});
    if (!result.replay_estimated.t.empty()) {
        emit_columns_csv(path("fig_delta_f.csv"),
                         {"t", "delta_f_nominal_mhz", "delta_f_estimated_mhz"},
                         {result.replay_nominal.t, result.replay_nominal.delta_f_mhz,
                          result.replay_estimated.delta_f_mhz});
    } else {
        emit_columns_csv(path("fig_delta_f.csv"), {"t", "delta_f_nominal_mhz"},
                         {result.replay_nominal.t, result.replay_nominal.delta_f_mhz});
    }

    nlohmann::ordered_json report;
    report["final_rel_err_eta1"] = result.report.final_rel_err[0];
    report["final_rel_err_eta2"] = result.report.final_rel_err[1];
    report["e_avg"] = result.report.e_avg;
    report["delta_f_max_nominal_mhz"] = result.report.delta_f_max_nominal;
    report["delta_f_max_estimated_mhz"] = result.report.delta_f_max_estimated;
    report["delta_l2_final"] = result.report.delta_l2_final;
    report["runtime_s"] = result.report.runtime_s;
    report["h_tot_hat"] = result.estimates.back().h_tot_hat;
    report["p_m_pfc_hat"] = result.estimates.back().p_m_pfc_hat;
    report["h_tot_true"] = result.truth.truth.back().h_tot;
    report["p_m_pfc_true"] = result.truth.truth.back().p_m_pfc;
    report["divergence_warned"] = result.divergence_warned;
    report["seed"] = config.seed;
    std::ofstream out(path("report.json"));
    if (!out) throw IoError("cannot write report.json in " + out_dir);
    out << report.dump(2) << '\n';
}

namespace {

using nlohmann::json;

void to_json_params(json& j, const AggParams& p) {
    j = {{"s_b", p.s_b},     {"h_tot", p.h_tot}, {"omega0", p.omega0}, {"k_p", p.k_p},
         {"p_m_pfc", p.p_m_pfc}, {"t_p", p.t_p},     {"t_z", p.t_z},       {"f_nom", p.f_nom}};
}

void from_json_params(const json& j, AggParams& p) {
    p.s_b = j.value("s_b", p.s_b);
    p.h_tot = j.value("h_tot", p.h_tot);
    p.omega0 = j.value("omega0", p.omega0);
    p.k_p = j.value("k_p", p.k_p);
    p.p_m_pfc = j.value("p_m_pfc", p.p_m_pfc);
    p.t_p = j.value("t_p", p.t_p);
    p.t_z = j.value("t_z", p.t_z);
    p.f_nom = j.value("f_nom", p.f_nom);
}

std::string agg_kind_name(AggEventKind k) {
    switch (k) {
    case AggEventKind::PmStep: return "pm_step";
    case AggEventKind::LoadStep: return "load_step";
    case AggEventKind::LoadRamp: return "load_ramp";
    }
    return "?";
}

AggEventKind agg_kind_from(const std::string& s) {
    if (s == "pm_step") return AggEventKind::PmStep;
    if (s == "load_step") return AggEventKind::LoadStep;
    if (s == "load_ramp") return AggEventKind::LoadRamp;
    throw ConfigError("unknown aggregated event kind '" + s + "'");
}

std::string mm_kind_name(EventKind k) {
    switch (k) {
    case EventKind::Outage: return "outage";
    case EventKind::LoadStep: return "load_step";
    case EventKind::RescheduleRamp: return "reschedule_ramp";
    }
    return "?";
}

EventKind mm_kind_from(const std::string& s) {
    if (s == "outage") return EventKind::Outage;
    if (s == "load_step") return EventKind::LoadStep;
    if (s == "reschedule_ramp") return EventKind::RescheduleRamp;
    throw ConfigError("unknown event kind '" + s + "'");
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }

    ExperimentConfig cfg;
    const std::string model = j.value("model", "aggregated");
    if (model == "aggregated") {
        cfg.model = ModelKind::Aggregated;
    } else if (model == "multimachine") {
        cfg.model = ModelKind::MultiMachine;
    } else {
        throw ConfigError("config: model must be 'aggregated' or 'multimachine'");
    }
    cfg.seed = j.value("seed", 0ULL);

    if (j.contains("aggregated")) from_json_params(j["aggregated"], cfg.agg_params);
    if (j.contains("agg_scenario")) {
        const auto& s = j["agg_scenario"];
        cfg.agg_scenario.duration = s.value("duration", cfg.agg_scenario.duration);
        cfg.agg_scenario.dt = s.value("dt", cfg.agg_scenario.dt);
        cfg.agg_scenario.events.clear();
        for (const auto& e : s.value("events", json::array())) {
            cfg.agg_scenario.events.push_back({e.at("time").get<double>(),
                                               agg_kind_from(e.at("kind").get<std::string>()),
                                               e.at("delta").get<double>(),
                                               e.value("ramp_time", 0.0)});
        }
    }
    if (j.contains("fleet")) {
        for (const auto& m : j["fleet"]) {
            MachineParams mp;
            mp.h_i = m.at("h_i").get<double>();
            mp.s_bi = m.at("s_bi").get<double>();
            mp.p_mi = m.at("p_mi").get<double>();
            mp.k_i = m.value("k_i", 0.0);
            mp.t_pi = m.value("t_pi", mp.t_pi);
            mp.t_zi = m.value("t_zi", mp.t_zi);
            mp.is_pfc = m.value("is_pfc", mp.k_i > 0.0);
            mp.k_sync = m.value("k_sync", mp.k_sync);
            cfg.fleet.push_back(mp);
        }
    }
    if (j.contains("mm_scenario")) {
        const auto& s = j["mm_scenario"];
        cfg.mm_scenario.duration = s.value("duration", cfg.mm_scenario.duration);
        cfg.mm_scenario.dt = s.value("dt", cfg.mm_scenario.dt);
        cfg.mm_scenario.events.clear();
        for (const auto& e : s.value("events", json::array())) {
            ScenarioEvent ev;
            ev.time = e.at("time").get<double>();
            ev.kind = mm_kind_from(e.at("kind").get<std::string>());
            ev.machine = e.value("machine", 0U);
            ev.delta_p = e.value("delta_p", 0.0);
            ev.ramp_time = e.value("ramp_time", 0.0);
            cfg.mm_scenario.events.push_back(ev);
        }
        if (s.contains("noise")) {
            NoiseSpec ns;
            ns.std_omega = s["noise"].value("std_omega", 0.0);
            ns.std_p_pfc = s["noise"].value("std_p_pfc", 0.0);
            ns.std_p_e = s["noise"].value("std_p_e", 0.0);
            ns.seed = s["noise"].value("seed", cfg.seed);
            cfg.mm_scenario.noise = ns;
        }
    }
    if (j.contains("estimator")) {
        const auto& e = j["estimator"];
        auto& c = cfg.estimator;
        c.alpha = e.value("alpha", c.alpha);
        c.d = e.value("d", c.d);
        c.gamma1 = e.value("gamma1", c.gamma1);
        c.gamma2 = e.value("gamma2", c.gamma2);
        c.dt = e.value("dt", c.dt);
        c.warmup = e.value("warmup", c.warmup);
        c.y_guard = e.value("y_guard", c.y_guard);
        c.eta1_init = e.value("eta1_init", c.eta1_init);
        c.eta2_init = e.value("eta2_init", c.eta2_init);
        const std::string src = e.value("pfc_source", "measured");
        if (src == "measured") {
            c.pfc_source = PfcSource::Measured;
        } else if (src == "reconstructed") {
            c.pfc_source = PfcSource::Reconstructed;
        } else {
            throw ConfigError("config: pfc_source must be 'measured' or 'reconstructed'");
        }
    }
    if (j.contains("metrics")) {
        cfg.e_avg_t1 = j["metrics"].value("e_avg_t1", cfg.e_avg_t1);
        cfg.e_avg_t2 = j["metrics"].value("e_avg_t2", cfg.e_avg_t2);
    }
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    nlohmann::ordered_json j;
    j["model"] = cfg.model == ModelKind::Aggregated ? "aggregated" : "multimachine";
    j["seed"] = cfg.seed;
    json agg;
    to_json_params(agg, cfg.agg_params);
    j["aggregated"] = agg;
    j["agg_scenario"] = {{"duration", cfg.agg_scenario.duration},
                         {"dt", cfg.agg_scenario.dt},
                         {"events", json::array()}};
    for (const auto& e : cfg.agg_scenario.events) {
        j["agg_scenario"]["events"].push_back({{"time", e.time},
                                               {"kind", agg_kind_name(e.kind)},
                                               {"delta", e.delta},
                                               {"ramp_time", e.ramp_time}});
    }
    j["fleet"] = json::array();
    for (const auto& m : cfg.fleet) {
        j["fleet"].push_back({{"h_i", m.h_i},
                              {"s_bi", m.s_bi},
                              {"p_mi", m.p_mi},
                              {"k_i", m.k_i},
                              {"t_pi", m.t_pi},
                              {"t_zi", m.t_zi},
                              {"is_pfc", m.is_pfc},
                              {"k_sync", m.k_sync}});
    }
    j["mm_scenario"] = {{"duration", cfg.mm_scenario.duration},
                        {"dt", cfg.mm_scenario.dt},
                        {"events", json::array()}};
    for (const auto& e : cfg.mm_scenario.events) {
        j["mm_scenario"]["events"].push_back({{"time", e.time},
                                              {"kind", mm_kind_name(e.kind)},
                                              {"machine", e.machine},
                                              {"delta_p", e.delta_p},
                                              {"ramp_time", e.ramp_time}});
    }
    if (cfg.mm_scenario.noise) {
        j["mm_scenario"]["noise"] = {{"std_omega", cfg.mm_scenario.noise->std_omega},
                                     {"std_p_pfc", cfg.mm_scenario.noise->std_p_pfc},
                                     {"std_p_e", cfg.mm_scenario.noise->std_p_e},
                                     {"seed", cfg.mm_scenario.noise->seed}};
    }
    j["estimator"] = {{"alpha", cfg.estimator.alpha},
                      {"d", cfg.estimator.d},
                      {"gamma1", cfg.estimator.gamma1},
                      {"gamma2", cfg.estimator.gamma2},
                      {"dt", cfg.estimator.dt},
                      {"warmup", cfg.estimator.warmup},
                      {"y_guard", cfg.estimator.y_guard},
                      {"eta1_init", cfg.estimator.eta1_init},
                      {"eta2_init", cfg.estimator.eta2_init},
                      {"pfc_source", cfg.estimator.pfc_source == PfcSource::Measured
                                         ? "measured"
                                         : "reconstructed"}};
    j["metrics"] = {{"e_avg_t1", cfg.e_avg_t1}, {"e_avg_t2", cfg.e_avg_t2}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot write config " + path);
    out << j.dump(2) << '\n';
}

} // namespace gridest
