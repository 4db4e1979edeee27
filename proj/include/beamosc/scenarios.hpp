#pragma once

#include <cstdio>
#include <filesystem>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "beamosc/classical.hpp"
#include "beamosc/config.hpp"
#include "beamosc/errors.hpp"
#include "beamosc/io.hpp"
#include "beamosc/perturbation.hpp"
#include "beamosc/tdse.hpp"
#include "beamosc/twoparticle.hpp"

namespace beamosc {

namespace detail {

inline std::pair<double, double> resolve_time_span(const ScenarioConfig& cfg,
                                                   const ModelParams& p) {
    if (!std::isnan(cfg.numerics.t_start)) {
        return {cfg.numerics.t_start, cfg.numerics.t_end};
    }
    const double half = default_half_span(p, cfg.window);
    return {-half, half};
}

inline Grid1D resolve_grid(const ScenarioConfig& cfg, const ModelParams& p) {
    return Grid1D::symmetric(cfg.numerics.grid_halfwidth * p.oscillator_length(),
                             cfg.numerics.grid_points);
}

inline std::string format_compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Evolves the driven oscillator from the discrete ground state across the
// passage window, recording observables every stride steps.
struct TdseRun {
    WaveFunction1D final_state;
    std::vector<EvolutionSample> history;
};

inline TdseRun run_driven_evolution(const ScenarioConfig& cfg, const ModelParams& p) {
    const auto [t0, t1] = resolve_time_span(cfg, p);
    const Grid1D grid = resolve_grid(cfg, p);
    WaveFunction1D psi = stationary_state(0, p, grid).psi;
    psi.t = t0;
    const WaveFunction1D basis0 = ho_eigenstate(0, p, grid);
    const WaveFunction1D basis1 = ho_eigenstate(1, p, grid);

    TdseRun run;
    const auto observe = [&](const WaveFunction1D& w) {
        EvolutionSample s;
        s.t = w.t;
        s.p0 = std::norm(inner_product(basis0, w));
        s.p1 = std::norm(inner_product(basis1, w));
        s.y_mean = expectation_y(w);
        s.p_mean = expectation_p(w, p);
        s.norm = w.norm_squared();
        run.history.push_back(s);
    };
    run.final_state = evolve_tdse(std::move(psi), p, cfg.window, t1, cfg.numerics.dt, observe,
                                  cfg.numerics.stride, cfg.numerics.scheme);
    return run;
}

} // namespace detail

// One trajectory file per configured beam speed.
inline int run_classical_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity) {
    const std::filesystem::path dir = cfg.output_dir;
    const std::vector<double> speeds =
        cfg.v_list.empty() ? std::vector<double>{cfg.params.v} : cfg.v_list;
    for (double v : speeds) {
        ModelParams p = cfg.params;
        p.v = v;
        const auto [t0, t1] = detail::resolve_time_span(cfg, p);
        const ClassicalState initial{t0, p.v * t0, p.m * p.v, 0.0, 0.0};
        const ClassicalTrajectory traj =
            integrate_classical(p, cfg.window, initial, cfg.numerics.dt, t1);

        CsvWriter csv(dir / ("trajectory_v" + detail::format_compact(v) + ".csv"),
                      {"t", "x", "p_x", "y", "p_y", "H"});
        const auto stride = static_cast<std::size_t>(cfg.numerics.stride);
        for (std::size_t i = 0; i < traj.states.size(); i += stride) {
            const auto& s = traj.states[i];
            csv.row({CsvWriter::num(s.t), CsvWriter::num(s.x), CsvWriter::num(s.px),
                     CsvWriter::num(s.y), CsvWriter::num(s.py), CsvWriter::num(traj.energy[i])});
        }
        if ((traj.states.size() - 1) % stride != 0) {
            const auto& s = traj.states.back();
            csv.row({CsvWriter::num(s.t), CsvWriter::num(s.x), CsvWriter::num(s.px),
                     CsvWriter::num(s.y), CsvWriter::num(s.py), CsvWriter::num(traj.energy.back())});
        }
        if (verbosity >= 1) {
            log << "v = " << v
                << ": measured amplitude = " << measure_post_passage_amplitude(traj, p, cfg.window)
                << ", closed form = " << classical_amplitude_analytic(p, cfg.window) << "\n";
        }
    }
    log << "classical scenario: wrote " << speeds.size() << " trajectory file(s)\n";
    return 0;
}

// Time series of excitation probabilities and expectation values for the
// driven quantum oscillator, plus a final density snapshot.
inline int run_partial_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity) {
    const std::filesystem::path dir = cfg.output_dir;
    const detail::TdseRun run = detail::run_driven_evolution(cfg, cfg.params);

    CsvWriter series(dir / "timeseries.csv", {"t", "P0", "P1", "y_expect", "p_expect", "norm"});
    for (const auto& s : run.history) {
        series.row({CsvWriter::num(s.t), CsvWriter::num(s.p0), CsvWriter::num(s.p1),
                    CsvWriter::num(s.y_mean), CsvWriter::num(s.p_mean), CsvWriter::num(s.norm)});
    }

    CsvWriter snapshot(dir / "snapshot_final.csv", {"y", "density", "re", "im"});
    const auto& psi = run.final_state;
    for (int i = 0; i < psi.grid.n_points; ++i) {
        const auto a = psi.amp[static_cast<std::size_t>(i)];
        snapshot.row({CsvWriter::num(psi.grid.point(i)), CsvWriter::num(std::norm(a)),
                      CsvWriter::num(a.real()), CsvWriter::num(a.imag())});
    }

    const auto& last = run.history.back();
    if (verbosity >= 1) {
        log << "final P0 = " << last.p0 << ", P1 = " << last.p1
            << ", closed form P1 = " << p1_partial(cfg.params, cfg.window).p1 << "\n";
    }
    log << "partial scenario: wrote timeseries.csv (" << run.history.size()
        << " samples) and snapshot_final.csv\n";
    return 0;
}

// Entangled two-branch final state and its oscillator density decomposition.
inline int run_full_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity) {
    const std::filesystem::path dir = cfg.output_dir;
    const ModelParams& p = cfg.params;
    const double k0 = cfg.k0_or_default();

    const ScatteringKinematics kin = scattered_wavenumber(k0, p);
    const TransitionResult tr = p1_full(p, cfg.window, k0);
    const FinalStateAmplitudes state = build_final_state(p, cfg.window, k0);

    write_json_file(dir / "transition.json", transition_to_json(tr, kin));
    write_json_file(dir / "final_state.json", final_state_to_json(state));

    const Grid1D grid = detail::resolve_grid(cfg, p);
    CsvWriter table(dir / "density_table.csv",
                    {"y", "density_unscattered", "density_scattered", "density_total"});
    for (int i = 0; i < grid.n_points; ++i) {
        const double y = grid.point(i);
        const auto [d0, d1] = branch_densities(state, y, p);
        table.row({CsvWriter::num(y), CsvWriter::num(d0), CsvWriter::num(d1),
                   CsvWriter::num(d0 + d1)});
    }
    if (verbosity >= 1) {
        log << "k0 = " << kin.k0 << ", k1 = " << kin.k1 << ", p1 = " << tr.p1 << "\n";
    }
    log << "full scenario: wrote transition.json, final_state.json, density_table.csv\n";
    return 0;
}

// Conditional branch-probability curves and Born-rule measurement samples.
inline int run_measure_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity) {
    const std::filesystem::path dir = cfg.output_dir;
    const ModelParams& p = cfg.params;
    const FinalStateAmplitudes state = build_final_state(p, cfg.window, cfg.k0_or_default());

    // Curve range: wide enough to show the crossover when there is one.
    const bool has_scattered = std::abs(state.c1) > 0.0;
    const double half_range = has_scattered ? 1.5 * crossover_position(state, p)
                                            : 6.0 * p.oscillator_length();
    constexpr int curve_points = 401;
    CsvWriter curves(dir / "conditional_curves.csv", {"y_prime", "p_k0", "p_k1"});
    for (int i = 0; i < curve_points; ++i) {
        // Symmetric form: the center point is exactly zero and y(i) = -y(n-1-i).
        const double y = half_range * (2.0 * i - (curve_points - 1)) / (curve_points - 1);
        const MeasurementOutcome mo = measure_oscillator_position(state, y, p);
        curves.row({CsvWriter::num(y), CsvWriter::num(std::norm(mo.posterior.c0)),
                    CsvWriter::num(std::norm(mo.posterior.c1))});
    }

    nlohmann::ordered_json summary;
    summary["seed"] = cfg.numerics.seed;
    summary["n_samples"] = cfg.numerics.n_samples;
    summary["born_weight_k0"] = std::norm(state.c0);
    summary["born_weight_k1"] = std::norm(state.c1);
    if (has_scattered) summary["crossover_position"] = crossover_position(state, p);

    const auto run_order = [&](MeasurementOrder order, const char* name) {
        const JointSampleResult result = sample_joint_measurement(
            state, cfg.numerics.seed, order, cfg.numerics.n_samples, p);
        CsvWriter tallies(dir / (std::string("tallies_") + name + ".csv"),
                          {"k_branch", "y_value"});
        for (const auto& s : result.samples) {
            tallies.row({CsvWriter::integer(s.branch), CsvWriter::num(s.y)});
        }
        summary[name] = {{"count_k0", result.count_k0}, {"count_k1", result.count_k1}};
    };
    run_order(MeasurementOrder::beam_first, "beam_first");
    run_order(MeasurementOrder::oscillator_first, "oscillator_first");
    write_json_file(dir / "measurement_summary.json", summary);

    if (verbosity >= 1 && has_scattered) {
        log << "crossover position = " << crossover_position(state, p) << "\n";
    }
    log << "measure scenario: wrote conditional_curves.csv, two tally files, "
           "measurement_summary.json\n";
    return 0;
}

namespace detail {

struct SweepRow {
    double v = 0.0;
    double alpha = 0.0;
    double ym_analytic = std::numeric_limits<double>::quiet_NaN();
    double ym_numeric = std::numeric_limits<double>::quiet_NaN();
    double p1_driven = std::numeric_limits<double>::quiet_NaN();
    double p1_scattering = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
};

inline SweepRow compute_sweep_point(const ScenarioConfig& cfg, double v, double alpha) {
    SweepRow row;
    row.v = v;
    row.alpha = alpha;
    try {
        ModelParams p = cfg.params;
        p.v = v;
        p.alpha = alpha;
        row.ym_analytic = classical_amplitude_analytic(p, cfg.window);
        const auto [t0, t1] = resolve_time_span(cfg, p);
        const ClassicalState initial{t0, p.v * t0, p.m * p.v, 0.0, 0.0};
        const ClassicalTrajectory traj =
            integrate_classical(p, cfg.window, initial, cfg.numerics.dt, t1);
        row.ym_numeric = measure_post_passage_amplitude(traj, p, cfg.window);
        row.p1_driven = p1_partial(p, cfg.window).p1;
        // A beam below one oscillator quantum has no scattering channel;
        // report the column as nan rather than failing the point.
        const double k0 = p.beam_wavenumber();
        const double kinetic = p.hbar * p.hbar * k0 * k0 / (2.0 * p.m);
        if (kinetic >= p.hbar * p.omega0) {
            row.p1_scattering = p1_full(p, cfg.window, k0).p1;
        }
    } catch (const std::exception&) {
        row.failed = true;
    }
    return row;
}

} // namespace detail

// Summary table over beam speeds and/or coupling strengths; points run
// concurrently, output order is deterministic.
inline int run_sweep_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity) {
    if (cfg.v_list.empty() && cfg.alpha_list.empty()) {
        throw config_error("sweep requires sweep.v_list or sweep.alpha_list");
    }
    const std::vector<double> speeds =
        cfg.v_list.empty() ? std::vector<double>{cfg.params.v} : cfg.v_list;
    const std::vector<double> alphas =
        cfg.alpha_list.empty() ? std::vector<double>{cfg.params.alpha} : cfg.alpha_list;

    std::vector<std::pair<double, double>> points;
    for (double v : speeds) {
        for (double a : alphas) points.emplace_back(v, a);
    }

    std::vector<detail::SweepRow> rows(points.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t begin = 0; begin < points.size(); begin += workers) {
        const std::size_t end = std::min(points.size(), begin + workers);
        std::vector<std::future<detail::SweepRow>> batch;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, detail::compute_sweep_point,
                                       std::cref(cfg), points[i].first, points[i].second));
        }
        for (std::size_t i = begin; i < end; ++i) rows[i] = batch[i - begin].get();
    }

    CsvWriter csv(std::filesystem::path(cfg.output_dir) / "sweep.csv",
                  {"v", "alpha", "y_m_analytic", "y_m_numeric", "p1_partial", "p1_full",
                   "status"});
    bool any_failed = false;
    for (const auto& row : rows) {
        any_failed = any_failed || row.failed;
        csv.row({CsvWriter::num(row.v), CsvWriter::num(row.alpha),
                 CsvWriter::num(row.ym_analytic), CsvWriter::num(row.ym_numeric),
                 CsvWriter::num(row.p1_driven), CsvWriter::num(row.p1_scattering),
                 row.failed ? "failed" : "ok"});
        if (verbosity >= 1) {
            log << "v = " << row.v << ", alpha = " << row.alpha
                << ": y_m = " << row.ym_analytic << (row.failed ? " (failed)" : "") << "\n";
        }
    }
    log << "sweep scenario: wrote sweep.csv (" << rows.size() << " points)"
        << (any_failed ? "; some points failed" : "") << "\n";
    return any_failed ? 2 : 0;
}

// Cross-treatment report: classical amplitude vs its closed form, evolved
// excitation probability vs both closed forms, checked against the
// configured tolerances.
inline int run_compare_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity) {
    const ModelParams& p = cfg.params;
    const auto [t0, t1] = detail::resolve_time_span(cfg, p);

    const ClassicalState initial{t0, p.v * t0, p.m * p.v, 0.0, 0.0};
    const ClassicalTrajectory traj =
        integrate_classical(p, cfg.window, initial, cfg.numerics.dt, t1);
    const double ym_numeric = measure_post_passage_amplitude(traj, p, cfg.window);
    const double ym_analytic = classical_amplitude_analytic(p, cfg.window);

    const detail::TdseRun run = detail::run_driven_evolution(cfg, p);
    const double p1_tdse = overlap_probability(run.final_state, 1, p);
    const double p1_driven = p1_partial(p, cfg.window).p1;
    const double p1_scattering = p1_full(p, cfg.window, cfg.k0_or_default()).p1;

    const double rd_amplitude = std::abs(ym_numeric - ym_analytic) / ym_analytic;
    const double rd_tdse = std::abs(p1_tdse - p1_driven) / p1_driven;
    const double rd_cross = std::abs(p1_scattering - p1_driven) / p1_driven;
    const bool pass = rd_amplitude <= cfg.tolerances.amplitude &&
                      rd_tdse <= cfg.tolerances.p1_tdse && rd_cross <= cfg.tolerances.p1_cross;

    CsvWriter csv(std::filesystem::path(cfg.output_dir) / "compare.csv",
                  {"v", "y_m_numeric", "y_m_analytic", "rel_diff_amplitude", "p1_tdse",
                   "p1_partial", "p1_full", "rel_diff_tdse", "rel_diff_cross", "status"});
    csv.row({CsvWriter::num(p.v), CsvWriter::num(ym_numeric), CsvWriter::num(ym_analytic),
             CsvWriter::num(rd_amplitude), CsvWriter::num(p1_tdse), CsvWriter::num(p1_driven),
             CsvWriter::num(p1_scattering), CsvWriter::num(rd_tdse), CsvWriter::num(rd_cross),
             pass ? "pass" : "fail"});

    if (verbosity >= 1) {
        log << "y_m numeric / analytic: " << ym_numeric << " / " << ym_analytic
            << " (rel diff " << rd_amplitude << ", tol " << cfg.tolerances.amplitude << ")\n"
            << "P1 evolved / driven / scattering: " << p1_tdse << " / " << p1_driven << " / "
            << p1_scattering << " (rel diffs " << rd_tdse << ", " << rd_cross << ")\n";
    }
    log << "compare scenario: " << (pass ? "all checks within tolerance" : "TOLERANCE EXCEEDED")
        << "; wrote compare.csv\n";
    return pass ? 0 : 2;
}

inline int run_scenario(const ScenarioConfig& cfg, std::ostream& log, int verbosity = 0) {
    if (cfg.output_dir.empty()) throw config_error("output directory is not set");
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw config_error("cannot create output directory '" + cfg.output_dir +
                           "': " + ec.message());
    }
    switch (cfg.scenario) {
        case ScenarioKind::classical: return run_classical_scenario(cfg, log, verbosity);
        case ScenarioKind::partial: return run_partial_scenario(cfg, log, verbosity);
        case ScenarioKind::full: return run_full_scenario(cfg, log, verbosity);
        case ScenarioKind::measure: return run_measure_scenario(cfg, log, verbosity);
        case ScenarioKind::sweep: return run_sweep_scenario(cfg, log, verbosity);
        case ScenarioKind::compare: return run_compare_scenario(cfg, log, verbosity);
    }
    throw config_error("unknown scenario");
}

} // namespace beamosc
