#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gridest/csv_io.hpp"
#include "gridest/metrics.hpp"
#include "gridest/scenario.hpp"

using namespace gridest;
namespace fs = std::filesystem;

namespace {

const AggParams kTable{};

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("gridest_test_" + name)).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::vector<Sample> random_stream(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1e-3);
    std::vector<Sample> stream;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * 1e-3;
        stream.push_back({t, 1.0 + noise(rng), 0.498 + noise(rng), 0.5 + noise(rng)});
    }
    return stream;
}

} // namespace

TEST_CASE("measurement CSV round-trips bit-exactly") {
    const auto path = tmp_path("roundtrip.csv");
    const auto stream = random_stream(200, 1);
    emit_csv(stream, path);
    const auto back = ingest_csv(path, kTable, FreqUnit::Auto);
    REQUIRE(back.size() == stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        CHECK(back[i].t == stream[i].t);
        CHECK(back[i].omega_av == stream[i].omega_av);
        CHECK(back[i].p_pfc_tot == stream[i].p_pfc_tot);
        CHECK(back[i].p_e_pfc == stream[i].p_e_pfc);
    }
}

TEST_CASE("hand-written fixture parses to exact values") {
    const auto path = tmp_path("fixture.csv");
    write_text(path, "t,f_av,p_pfc_tot,p_e_pfc\n"
                     "0,1,0.498,0.5\n"
                     "0.001,0.9995,0.4985,0.5005\n"
                     "0.002,0.999,0.499,0.501\n");
    const auto stream = ingest_csv(path, kTable, FreqUnit::Pu);
    REQUIRE(stream.size() == 3);
    CHECK(stream[1].t == 0.001);
    CHECK(stream[1].omega_av == 0.9995);
    CHECK(stream[2].p_pfc_tot == 0.499);
    CHECK(stream[2].p_e_pfc == 0.501);
}

TEST_CASE("bad header is rejected with the expected header named") {
    const auto path = tmp_path("badheader.csv");
    write_text(path, "time,freq,p1,p2\n0,1,0.5,0.5\n");
    try {
        ingest_csv(path, kTable);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("t,f_av,p_pfc_tot,p_e_pfc") != std::string::npos);
        CHECK(msg.find(":1") != std::string::npos);
    }
}

TEST_CASE("malformed row reports path and line number") {
    const auto path = tmp_path("malformed.csv");
    write_text(path, "t,f_av,p_pfc_tot,p_e_pfc\n"
                     "0,1,0.498,0.5\n"
                     "0.001,oops,0.498,0.5\n");
    try {
        ingest_csv(path, kTable);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(path) != std::string::npos);
        CHECK(msg.find(":3") != std::string::npos);
    }
}

TEST_CASE("wrong field count and non-uniform spacing are rejected") {
    const auto path = tmp_path("fields.csv");
    write_text(path, "t,f_av,p_pfc_tot,p_e_pfc\n0,1,0.5\n");
    CHECK_THROWS_AS(ingest_csv(path, kTable), IoError);

    const auto path2 = tmp_path("spacing.csv");
    write_text(path2, "t,f_av,p_pfc_tot,p_e_pfc\n"
                      "0,1,0.498,0.5\n"
                      "0.001,1,0.498,0.5\n"
                      "0.0025,1,0.498,0.5\n");
    CHECK_THROWS_AS(ingest_csv(path2, kTable), IoError);

    const auto path3 = tmp_path("decreasing.csv");
    write_text(path3, "t,f_av,p_pfc_tot,p_e_pfc\n"
                      "0,1,0.498,0.5\n"
                      "0.002,1,0.498,0.5\n"
                      "0.001,1,0.498,0.5\n");
    CHECK_THROWS_AS(ingest_csv(path3, kTable), IoError);
}

TEST_CASE("Hz and pu inputs yield the same stream") {
    const auto stream = random_stream(300, 2);
    const auto pu_path = tmp_path("unit_pu.csv");
    emit_csv(stream, pu_path);

    // Same data with f_av scaled to Hz, written via the generic column writer.
    std::vector<std::vector<double>> cols(4);
    for (const auto& s : stream) {
        cols[0].push_back(s.t);
        cols[1].push_back(s.omega_av * kTable.f_nom);
        cols[2].push_back(s.p_pfc_tot);
        cols[3].push_back(s.p_e_pfc);
    }
    const auto hz_path = tmp_path("unit_hz.csv");
    emit_columns_csv(hz_path, {"t", "f_av", "p_pfc_tot", "p_e_pfc"}, cols);

    const auto from_pu = ingest_csv(pu_path, kTable, FreqUnit::Auto);
    const auto from_hz = ingest_csv(hz_path, kTable, FreqUnit::Auto);
    REQUIRE(from_pu.size() == from_hz.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < from_pu.size(); ++i) {
        worst = std::max(worst, std::abs(from_pu[i].omega_av - from_hz[i].omega_av));
    }
    CHECK(worst <= 1e-12);

    // And the estimator sees identical data within the same tolerance.
    EstimatorConfig cfg;
    cfg.eta1_init = 0.1;
    cfg.eta2_init = 0.05;
    const auto est_pu = run_estimator(from_pu, cfg, kTable);
    const auto est_hz = run_estimator(from_hz, cfg, kTable);
    for (std::size_t i = 0; i < est_pu.size(); ++i) {
        CHECK(std::abs(est_pu[i].eta1_hat - est_hz[i].eta1_hat) <= 1e-12);
        CHECK(std::abs(est_pu[i].eta2_hat - est_hz[i].eta2_hat) <= 1e-12);
    }
}

TEST_CASE("ambiguous frequency unit is an error unless forced") {
    const auto path = tmp_path("ambiguous.csv");
    write_text(path, "t,f_av,p_pfc_tot,p_e_pfc\n"
                     "0,25,0.498,0.5\n"
                     "0.001,25,0.498,0.5\n");
    CHECK_THROWS_AS(ingest_csv(path, kTable, FreqUnit::Auto), IoError);
    const auto forced = ingest_csv(path, kTable, FreqUnit::Hz);
    CHECK(forced[0].omega_av == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("truth and estimates CSVs round-trip") {
    const auto tpath = tmp_path("truth.csv");
    std::vector<TruthPoint> truth{{0.0, 3.665, 0.498}, {0.001, 3.595, 0.4985}};
    emit_truth_csv(truth, tpath);
    const auto tback = ingest_truth_csv(tpath);
    REQUIRE(tback.size() == 2);
    CHECK(tback[1].h_tot == 3.595);
    CHECK(tback[1].p_m_pfc == 0.4985);

    const auto epath = tmp_path("estimates.csv");
    std::vector<EstimateRecord> est{{0.0, 0.1, 0.05, 10.0, 0.5, 0.0},
                                    {0.001, 0.273, 0.136, 3.663, 0.498, 1e-4}};
    emit_estimates_csv(est, epath);
    const auto eback = ingest_estimates_csv(epath);
    REQUIRE(eback.size() == 2);
    CHECK(eback[1].eta1_hat == 0.273);
    CHECK(eback[1].delta_l2 == 1e-4);
}

TEST_CASE("column writer rejects ragged or mismatched input") {
    CHECK_THROWS_AS(emit_columns_csv(tmp_path("ragged.csv"), {"a", "b"}, {{1.0, 2.0}, {3.0}}),
                    IoError);
    CHECK_THROWS_AS(emit_columns_csv(tmp_path("mismatch.csv"), {"a"}, {{1.0}, {2.0}}), IoError);
}

TEST_CASE("metric_e_avg") {
    const TrueTheta theta{0.273, 0.136};
    std::vector<EstimateRecord> exact, off;
    for (int k = 0; k <= 1000; ++k) {
        const double t = static_cast<double>(k) * 0.01; // 10 s
        exact.push_back({t, theta.eta1, theta.eta2, 0.0, 0.0, 0.0});
        off.push_back({t, 1.1 * theta.eta1, 1.05 * theta.eta2, 0.0, 0.0, 0.0});
    }
    CHECK(metric_e_avg(exact, theta, 2.0, 8.0) == doctest::Approx(0.0).epsilon(1e-15));
    // Max over components picks the 10% channel.
    CHECK(metric_e_avg(off, theta, 2.0, 8.0) == doctest::Approx(0.10).epsilon(1e-9));
    CHECK_THROWS_AS(metric_e_avg(exact, theta, 8.0, 2.0), ConfigError);
    CHECK_THROWS_AS(metric_e_avg(exact, theta, 2.0, 50.0), ConfigError);
    CHECK_THROWS_AS(metric_e_avg({}, theta, 0.0, 1.0), ConfigError);
}

TEST_CASE("frequency replay separates the true inertia from a wrong one") {
    AggScenarioSpec spec{40.0, 1e-3, {{5.0, AggEventKind::PmStep, -1455.0 / kTable.s_b, 0.0}}};
    const auto res = simulate_aggregated(kTable, spec);

    const auto good = metric_freq_replay(res.samples, res.truth, kTable.h_tot, kTable);
    const auto bad = metric_freq_replay(res.samples, res.truth, 2.0 * kTable.h_tot, kTable);
    CHECK(good.inf_norm_mhz <= 1e-3);       // true H reproduces the recording
    CHECK(bad.inf_norm_mhz > 1.0);          // doubled H visibly does not
    CHECK(bad.inf_norm_mhz > 100.0 * good.inf_norm_mhz);
    CHECK(good.t.size() == res.samples.size());

    CHECK_THROWS_AS(metric_freq_replay(res.samples, {}, kTable.h_tot, kTable), ConfigError);
    CHECK_THROWS_AS(metric_freq_replay(res.samples, res.truth, -1.0, kTable), ConfigError);
}

TEST_CASE("experiment config JSON round-trips") {
    auto cfg = preset_config("multimachine-outage", 7);
    cfg.estimator.gamma1 = 12345.0;
    cfg.e_avg_t1 = 30.0;
    cfg.e_avg_t2 = 90.0;
    const auto path = tmp_path("config.json");
    save_config(cfg, path);
    const auto back = load_config(path);
    CHECK(back.model == cfg.model);
    CHECK(back.seed == cfg.seed);
    CHECK(back.estimator.gamma1 == cfg.estimator.gamma1);
    CHECK(back.estimator.alpha == cfg.estimator.alpha);
    CHECK(back.estimator.pfc_source == cfg.estimator.pfc_source);
    CHECK(back.e_avg_t1 == cfg.e_avg_t1);
    CHECK(back.e_avg_t2 == cfg.e_avg_t2);
    REQUIRE(back.fleet.size() == cfg.fleet.size());
    for (std::size_t i = 0; i < cfg.fleet.size(); ++i) {
        CHECK(back.fleet[i].h_i == cfg.fleet[i].h_i);
        CHECK(back.fleet[i].s_bi == cfg.fleet[i].s_bi);
        CHECK(back.fleet[i].k_i == cfg.fleet[i].k_i);
        CHECK(back.fleet[i].is_pfc == cfg.fleet[i].is_pfc);
    }
    REQUIRE(back.mm_scenario.events.size() == cfg.mm_scenario.events.size());
    CHECK(back.mm_scenario.events[0].kind == cfg.mm_scenario.events[0].kind);
    CHECK(back.mm_scenario.events[0].time == cfg.mm_scenario.events[0].time);
}
