#include "gridest/truth_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace gridest {

void MachineParams::validate() const {
    if (!(h_i > 0.0)) throw ConfigError("MachineParams: h_i must be > 0");
    if (!(s_bi > 0.0)) throw ConfigError("MachineParams: s_bi must be > 0");
    if (is_pfc != (k_i > 0.0)) throw ConfigError("MachineParams: is_pfc must match k_i > 0");
    if (is_pfc && !(t_zi < t_pi)) throw ConfigError("MachineParams: lead-lag requires t_zi < t_pi");
    if (!(k_sync >= 0.0)) throw ConfigError("MachineParams: k_sync must be >= 0");
}

void ScenarioSpec::validate(std::size_t n_machines) const {
    if (!(dt > 0.0)) throw ConfigError("ScenarioSpec: dt must be > 0");
    if (!(duration > 0.0)) throw ConfigError("ScenarioSpec: duration must be > 0");
    for (const auto& ev : events) {
        if (!(ev.time > 0.0) || !(ev.time < duration)) {
            throw ConfigError("ScenarioSpec: event time must lie strictly inside (0, duration)");
        }
        if ((ev.kind == EventKind::Outage || ev.kind == EventKind::RescheduleRamp) &&
            ev.machine >= n_machines) {
            throw ConfigError("ScenarioSpec: event references machine index " +
                              std::to_string(ev.machine) + " out of range");
        }
        if (ev.kind == EventKind::RescheduleRamp && ev.ramp_time < 0.0) {
            throw ConfigError("ScenarioSpec: ramp_time must be >= 0");
        }
    }
}

double compute_coi(const std::vector<double>& speeds, const std::vector<MachineParams>& machines) {
    if (speeds.empty() || speeds.size() != machines.size()) {
        throw ConfigError("compute_coi: speed and machine lists must have equal nonzero length");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        const double w = machines[i].h_i * machines[i].s_bi;
        num += w * speeds[i];
        den += w;
    }
    return num / den;
}

double compute_h_tot(const std::vector<MachineParams>& machines) {
    if (machines.empty()) throw ConfigError("compute_h_tot: empty machine list");
    double num = 0.0, den = 0.0;
    for (const auto& m : machines) {
        num += m.h_i * m.s_bi;
        den += m.s_bi;
    }
    return num / den;
}

double compute_avg_freq(const std::vector<double>& speeds,
                        const std::vector<MachineParams>& machines) {
    if (speeds.size() != machines.size()) {
        throw ConfigError("compute_avg_freq: speed and machine lists must have equal length");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        if (machines[i].is_pfc) {
            sum += speeds[i];
            ++n;
        }
    }
    if (n == 0) throw ConfigError("compute_avg_freq: no PFC machines");
    return sum / static_cast<double>(n);
}

double compute_p_m_pfc(const std::vector<MachineParams>& machines) {
    double num = 0.0, den = 0.0;
    std::size_t n_pfc = 0;
    for (const auto& m : machines) {
        den += m.s_bi;
        if (m.is_pfc) {
            num += m.p_mi * m.s_bi;
            ++n_pfc;
        }
    }
    if (n_pfc == 0) throw ConfigError("compute_p_m_pfc: no PFC machines");
    return num / den;
}

namespace {

constexpr double kOmega0 = 1.0;

struct FleetState {
    std::vector<double> omega;
    std::vector<double> delta;
    std::vector<double> g; // governor lag state, PFC machines only
};

struct FleetDeriv {
    std::vector<double> d_omega;
    std::vector<double> d_delta;
    std::vector<double> d_g;
};

struct ActiveRamp {
    std::size_t machine;
    double delta_machine_pu;
    double t0;
    double ramp_time;
};

// Effective mechanical setpoint of machine i at time t [pu on s_bi].
double effective_p_m(const std::vector<MachineParams>& machines,
                     const std::vector<ActiveRamp>& ramps, std::size_t i, double t) {
    double p = machines[i].p_mi;
    for (const auto& r : ramps) {
        if (r.machine != i) continue;
        if (r.ramp_time <= 0.0) {
            p += (t >= r.t0) ? r.delta_machine_pu : 0.0;
        } else {
            const double frac = std::clamp((t - r.t0) / r.ramp_time, 0.0, 1.0);
            p += frac * r.delta_machine_pu;
        }
    }
    return p;
}

double governor_power(const MachineParams& m, double omega, double g) {
    const double u_g = -m.k_i * (omega - kOmega0);
    return (m.t_zi / m.t_pi) * u_g + g;
}

// Electrical power of each active machine [pu on own base]:
// base share plus uniform synchronizing coupling against the weighted mean
// angle (weights k_sync*s_bi so the coupling cancels on the system base).
void electrical_powers(const std::vector<MachineParams>& machines,
                       const std::vector<bool>& active, const FleetState& s,
                       const std::vector<double>& p_share, std::vector<double>& p_e) {
    double dnum = 0.0, dden = 0.0;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        if (!active[i]) continue;
        const double w = machines[i].k_sync * machines[i].s_bi;
        dnum += w * s.delta[i];
        dden += w;
    }
    const double delta_mean = (dden > 0.0) ? dnum / dden : 0.0;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        p_e[i] = active[i] ? p_share[i] + machines[i].k_sync * (s.delta[i] - delta_mean) : 0.0;
    }
}

void fleet_rhs(const std::vector<MachineParams>& machines, const std::vector<bool>& active,
               const std::vector<double>& p_share, const std::vector<ActiveRamp>& ramps, double t,
               const FleetState& s, FleetDeriv& d, std::vector<double>& p_e_scratch) {
    const std::size_t n = machines.size();
    electrical_powers(machines, active, s, p_share, p_e_scratch);

    double coi_num = 0.0, coi_den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        const double w = machines[i].h_i * machines[i].s_bi;
        coi_num += w * s.omega[i];
        coi_den += w;
    }
    const double omega_coi = coi_num / coi_den;

    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) {
            d.d_omega[i] = d.d_delta[i] = d.d_g[i] = 0.0;
            continue;
        }
        const auto& m = machines[i];
        if (std::abs(s.omega[i]) < kFrequencyGuard) {
            throw FrequencyCollapseError("simulate_scenario: machine " + std::to_string(i) +
                                         " frequency collapsed at t = " + std::to_string(t));
        }
        const double pfc = m.is_pfc ? governor_power(m, s.omega[i], s.g[i]) : 0.0;
        const double p_m = effective_p_m(machines, ramps, i, t);
        d.d_omega[i] =
            (kOmega0 * kOmega0 / (2.0 * m.h_i)) * (p_m + pfc - p_e_scratch[i]) / s.omega[i];
        d.d_delta[i] = s.omega[i] - omega_coi;
        if (m.is_pfc) {
            const double u_g = -m.k_i * (s.omega[i] - kOmega0);
            d.d_g[i] = ((1.0 - m.t_zi / m.t_pi) * u_g - s.g[i]) / m.t_pi;
        } else {
            d.d_g[i] = 0.0;
        }
    }
}

void axpy(FleetState& out, const FleetState& s, const FleetDeriv& d, double h) {
    const std::size_t n = s.omega.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.omega[i] = s.omega[i] + h * d.d_omega[i];
        out.delta[i] = s.delta[i] + h * d.d_delta[i];
        out.g[i] = s.g[i] + h * d.d_g[i];
    }
}

} // namespace

ScenarioResult simulate_scenario(const std::vector<MachineParams>& machines,
                                 const ScenarioSpec& spec) {
    if (machines.empty()) throw ConfigError("simulate_scenario: empty machine list");
    for (const auto& m : machines) m.validate();
    spec.validate(machines.size());

    const std::size_t n = machines.size();
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(spec.duration / spec.dt));

    FleetState state{std::vector<double>(n, kOmega0), std::vector<double>(n, 0.0),
                     std::vector<double>(n, 0.0)};
    std::vector<bool> active(n, true);
    std::vector<double> p_share(n);
    for (std::size_t i = 0; i < n; ++i) p_share[i] = machines[i].p_mi;

    // Prime governor states so a balanced fleet starts at equilibrium.
    for (std::size_t i = 0; i < n; ++i) state.g[i] = 0.0;

    std::vector<ActiveRamp> ramps;
    auto events = spec.events;
    std::sort(events.begin(), events.end(),
              [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.time < b.time; });
    std::size_t next_event = 0;

    std::optional<std::mt19937_64> rng;
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (spec.noise) rng.emplace(spec.noise->seed);

    ScenarioResult result;
    result.samples.reserve(n_steps + 1);
    result.truth.reserve(n_steps + 1);

    FleetDeriv k1, k2, k3, k4;
    for (auto* d : {&k1, &k2, &k3, &k4}) {
        d->d_omega.assign(n, 0.0);
        d->d_delta.assign(n, 0.0);
        d->d_g.assign(n, 0.0);
    }
    FleetState scratch = state;
    std::vector<double> p_e(n, 0.0);

    auto system_base = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i]) s += machines[i].s_bi;
        return s;
    };

    auto emit = [&](double t) {
        const double s_base = system_base();
        double om_sum = 0.0, p_pfc = 0.0, pe_pfc = 0.0, pm_pfc = 0.0;
        double h_num = 0.0;
        std::size_t n_pfc = 0;
        electrical_powers(machines, active, state, p_share, p_e);
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            h_num += machines[i].h_i * machines[i].s_bi;
            if (!machines[i].is_pfc) continue;
            ++n_pfc;
            om_sum += state.omega[i];
            p_pfc += governor_power(machines[i], state.omega[i], state.g[i]) * machines[i].s_bi;
            pe_pfc += p_e[i] * machines[i].s_bi;
            pm_pfc += effective_p_m(machines, ramps, i, t) * machines[i].s_bi;
        }
        if (n_pfc == 0) throw ConfigError("simulate_scenario: no active PFC machines left");
        Sample s{t, om_sum / static_cast<double>(n_pfc), p_pfc / s_base, pe_pfc / s_base};
        if (rng) {
            s.omega_av += spec.noise->std_omega * gauss(*rng);
            s.p_pfc_tot += spec.noise->std_p_pfc * gauss(*rng);
            s.p_e_pfc += spec.noise->std_p_e * gauss(*rng);
        }
        result.samples.push_back(s);
        result.truth.push_back({t, h_num / s_base, pm_pfc / s_base});
    };

    auto apply_event = [&](const ScenarioEvent& ev, double t) {
        switch (ev.kind) {
        case EventKind::Outage: {
            if (!active[ev.machine]) throw ConfigError("simulate_scenario: machine already tripped");
            active[ev.machine] = false;
            // Survivors pick up the lost unit's electrical share, pro rata by rating.
            const double lost_abs = p_share[ev.machine] * machines[ev.machine].s_bi;
            const double s_surv = system_base();
            for (std::size_t i = 0; i < n; ++i)
                if (active[i]) p_share[i] += lost_abs / s_surv;
            break;
        }
        case EventKind::LoadStep:
            // delta_p on the current system base lands as the same per-unit
            // increment on every machine's own base.
            for (std::size_t i = 0; i < n; ++i)
                if (active[i]) p_share[i] += ev.delta_p;
            break;
        case EventKind::RescheduleRamp: {
            if (!active[ev.machine]) throw ConfigError("simulate_scenario: machine not active");
            const double s_base = system_base();
            ramps.push_back(
                {ev.machine, ev.delta_p * s_base / machines[ev.machine].s_bi, t, ev.ramp_time});
            break;
        }
        }
    };

    emit(0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        while (next_event < events.size() && events[next_event].time <= t + 1e-12) {
            apply_event(events[next_event], t);
            ++next_event;
        }

        fleet_rhs(machines, active, p_share, ramps, t, state, k1, p_e);
        axpy(scratch, state, k1, 0.5 * spec.dt);
        fleet_rhs(machines, active, p_share, ramps, t + 0.5 * spec.dt, scratch, k2, p_e);
        axpy(scratch, state, k2, 0.5 * spec.dt);
        fleet_rhs(machines, active, p_share, ramps, t + 0.5 * spec.dt, scratch, k3, p_e);
        axpy(scratch, state, k3, spec.dt);
        fleet_rhs(machines, active, p_share, ramps, t + spec.dt, scratch, k4, p_e);
        for (std::size_t i = 0; i < n; ++i) {
            state.omega[i] += spec.dt / 6.0 *
                              (k1.d_omega[i] + 2.0 * k2.d_omega[i] + 2.0 * k3.d_omega[i] +
                               k4.d_omega[i]);
            state.delta[i] += spec.dt / 6.0 *
                              (k1.d_delta[i] + 2.0 * k2.d_delta[i] + 2.0 * k3.d_delta[i] +
                               k4.d_delta[i]);
            state.g[i] +=
                spec.dt / 6.0 * (k1.d_g[i] + 2.0 * k2.d_g[i] + 2.0 * k3.d_g[i] + k4.d_g[i]);
        }
        emit(static_cast<double>(k + 1) * spec.dt);
    }
    return result;
}

std::vector<MachineParams> default_fleet(std::uint64_t seed) {
    const std::vector<double> ratings = {1500.0, 1300.0, 1600.0, 1100.0, 1400.0,
                                         1000.0, 1200.0, 210.0,  900.0,  800.0};
    const std::vector<double> h_base = {4.2, 3.1, 5.5, 2.7, 3.8, 4.9, 3.3, 2.9, 5.8, 2.6};
    const std::size_t n = ratings.size();
    const std::size_t n_pfc = 8;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);

    std::vector<MachineParams> fleet(n);
    for (std::size_t i = 0; i < n; ++i) {
        fleet[i].s_bi = ratings[i];
        fleet[i].h_i = h_base[i] * (1.0 + jitter(rng));
        fleet[i].p_mi = 0.498;
        fleet[i].is_pfc = i < n_pfc;
        fleet[i].k_i = fleet[i].is_pfc ? 1.0 + jitter(rng) : 0.0;
        fleet[i].t_pi = 12.983;
        fleet[i].t_zi = 6.0;
        fleet[i].k_sync = 200.0;
    }

    // Rescale inertias and droops so the aggregates hit the Table-style
    // defaults exactly: H_tot = 3.665 s, total droop 2.495 pu.
    const AggParams targets{};
    const double h_scale = targets.h_tot / compute_h_tot(fleet);
    double s_tot = 0.0, ks_pfc = 0.0;
    for (auto& m : fleet) {
        m.h_i *= h_scale;
        s_tot += m.s_bi;
        if (m.is_pfc) ks_pfc += m.k_i * m.s_bi;
    }
    const double k_scale = targets.k_p * s_tot / ks_pfc;
    for (auto& m : fleet)
        if (m.is_pfc) m.k_i *= k_scale;
    return fleet;
}

AggParams aggregate_fleet(const std::vector<MachineParams>& machines, const AggParams& base) {
    AggParams agg = base;
    double s_tot = 0.0, ks = 0.0, pm = 0.0, tp = 0.0, tz = 0.0, s_pfc = 0.0;
    for (const auto& m : machines) {
        s_tot += m.s_bi;
        if (m.is_pfc) {
            ks += m.k_i * m.s_bi;
            pm += m.p_mi * m.s_bi;
            tp += m.t_pi * m.s_bi;
            tz += m.t_zi * m.s_bi;
            s_pfc += m.s_bi;
        }
    }
    if (s_pfc <= 0.0) throw ConfigError("aggregate_fleet: no PFC machines");
    agg.s_b = s_tot;
    agg.h_tot = compute_h_tot(machines);
    agg.k_p = ks / s_tot;
    agg.p_m_pfc = pm / s_tot;
    agg.t_p = tp / s_pfc;
    agg.t_z = tz / s_pfc;
    return agg;
}

} // namespace gridest
