// Acceptance gate: one line per criterion, nonzero exit if any fails.
// argv[1] is the path to the command line binary, exercised in criterion 8.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "beamosc/classical.hpp"
#include "beamosc/model.hpp"
#include "beamosc/perturbation.hpp"
#include "beamosc/scenarios.hpp"
#include "beamosc/tdse.hpp"
#include "beamosc/twoparticle.hpp"

using namespace beamosc;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ClassicalTrajectory integrate_preset(const ModelParams& p, const WindowFunction& f, double dt) {
    const double half = default_half_span(p, f);
    const ClassicalState initial{-half, p.v * -half, p.m * p.v, 0.0, 0.0};
    return integrate_classical(p, f, initial, dt, half);
}

struct DrivenRun {
    std::vector<EvolutionSample> history;
    WaveFunction1D final_state;
};

DrivenRun drive_tdse(const ModelParams& p, const WindowFunction& f, double dt, int stride) {
    const Grid1D grid = Grid1D::default_for(p);
    const WaveFunction1D basis0 = ho_eigenstate(0, p, grid);
    const WaveFunction1D basis1 = ho_eigenstate(1, p, grid);
    WaveFunction1D psi = stationary_state(0, p, grid).psi;
    const double half = default_half_span(p, f);
    psi.t = -half;

    DrivenRun run;
    const auto observer = [&](const WaveFunction1D& w) {
        EvolutionSample s;
        s.t = w.t;
        s.p0 = std::norm(inner_product(basis0, w));
        s.p1 = std::norm(inner_product(basis1, w));
        s.y_mean = expectation_y(w);
        s.p_mean = expectation_p(w, p);
        s.norm = w.norm_squared();
        run.history.push_back(s);
    };
    run.final_state = evolve_tdse(std::move(psi), p, f, half, dt, observer, stride);
    return run;
}

double fitted_y_amplitude(const std::vector<EvolutionSample>& samples, const ModelParams& p,
                          const WindowFunction& f) {
    const double t_free = f.support_halfwidth(1e-12) / std::abs(p.v);
    double scc = 0.0, scs = 0.0, sss = 0.0, scy = 0.0, ssy = 0.0;
    for (const auto& s : samples) {
        if (s.t < t_free) continue;
        const double c = std::cos(p.omega0 * s.t);
        const double sn = std::sin(p.omega0 * s.t);
        scc += c * c;
        scs += c * sn;
        sss += sn * sn;
        scy += c * s.y_mean;
        ssy += sn * s.y_mean;
    }
    const double det = scc * sss - scs * scs;
    return std::hypot((sss * scy - scs * ssy) / det, (scc * ssy - scs * scy) / det);
}

// ---- criterion 8 plumbing ------------------------------------------------

int run_cli(const std::string& cli, const std::string& scenario, const fs::path& config,
            const fs::path& out_dir, const fs::path& log) {
    std::ostringstream cmd;
    cmd << '"' << cli << "\" " << scenario << " -c \"" << config.string() << "\" -o \""
        << out_dir.string() << "\" >> \"" << log.string() << "\" 2>&1";
    return std::system(cmd.str().c_str());
}

std::string read_bytes(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        files[fs::relative(entry.path(), dir).string()] = read_bytes(entry.path());
    }
    return files;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-cli-binary>\n";
        return 2;
    }
    const std::string cli = argv[1];

    const ModelParams preset;
    const WindowFunction window = WindowFunction::gaussian(10.0);
    std::vector<std::pair<std::string, Check>> results;

    // Criteria 1-3 share the classical trajectories.
    std::map<double, ClassicalTrajectory> trajectories;
    {
        Check c1;
        const auto start = std::chrono::steady_clock::now();
        try {
            for (double v : {1.0, 3.0, 7.0, 15.0}) {
                ModelParams p = preset;
                p.v = v;
                trajectories.emplace(v, integrate_preset(p, window, 1e-3));
            }
            for (double v : {3.0, 7.0, 15.0}) {
                ModelParams p = preset;
                p.v = v;
                const double measured =
                    measure_post_passage_amplitude(trajectories.at(v), p, window);
                const double closed = classical_amplitude_analytic(p, window);
                const double rel = std::abs(measured - closed) / closed;
                c1.require(rel <= 0.01, "v=" + fmt(v) + " amplitude off by " + fmt(rel));
            }
            ModelParams slow = preset;
            slow.v = 1.0;
            const double adiabatic =
                measure_post_passage_amplitude(trajectories.at(1.0), slow, window);
            c1.require(adiabatic < 1e-10, "v=1 residual amplitude " + fmt(adiabatic));
            const double elapsed = seconds_since(start);
            c1.require(elapsed < 10.0, "took " + fmt(elapsed) + " s (limit 10)");
            if (c1.pass) c1.detail = "amplitudes within 1%, v=1 adiabatic, " + fmt(elapsed) + " s";
        } catch (const std::exception& e) {
            c1.require(false, e.what());
        }
        results.emplace_back("classical amplitude vs closed form across speeds", c1);
    }

    {
        Check c2;
        try {
            const auto& traj = trajectories.at(7.0);
            const double e0 = traj.energy.front();
            double worst = 0.0;
            for (double e : traj.energy) worst = std::max(worst, std::abs(e - e0));
            worst /= std::abs(e0);
            c2.require(worst < 1e-6, "relative energy drift " + fmt(worst));
            if (c2.pass) c2.detail = "relative drift " + fmt(worst);
        } catch (const std::exception& e) {
            c2.require(false, e.what());
        }
        results.emplace_back("classical energy conservation at dt = 1e-3", c2);
    }

    {
        Check c3;
        try {
            const auto w = work_on_oscillator_analytic(preset, window);
            const double y_m = classical_amplitude_analytic(preset, window);
            const double from_amplitude =
                0.5 * preset.mu * preset.omega0 * preset.omega0 * y_m * y_m;
            const double identity_gap = std::abs(w.on_oscillator - from_amplitude) /
                                        from_amplitude;
            c3.require(identity_gap <= 1e-12,
                       "work/amplitude identity off by " + fmt(identity_gap));
            const double numeric = work_on_beam_numeric(trajectories.at(7.0), preset, window);
            const double rel = std::abs(numeric - w.on_beam) / std::abs(w.on_beam);
            c3.require(rel <= 0.02, "beam work off by " + fmt(rel));
            if (c3.pass) c3.detail = "beam work within " + fmt(rel) + " of closed form";
        } catch (const std::exception& e) {
            c3.require(false, e.what());
        }
        results.emplace_back("energy transfer matches the work closed form", c3);
    }

    // Criteria 4-5 share the driven quantum evolutions.
    DrivenRun coarse, fine;
    {
        Check c4;
        const auto start = std::chrono::steady_clock::now();
        try {
            coarse = drive_tdse(preset, window, 1e-3, 10);
            const double elapsed = seconds_since(start);
            const double p1_closed = p1_partial(preset, window).p1;
            const auto& last = coarse.history.back();
            const double rel = std::abs(last.p1 - p1_closed) / p1_closed;
            c4.require(rel <= 0.05, "P1 off by " + fmt(rel));
            double drift = 0.0;
            for (const auto& s : coarse.history) drift = std::max(drift, std::abs(s.norm - 1.0));
            c4.require(drift <= 1e-6, "norm drift " + fmt(drift));
            c4.require(std::abs(last.p0 + last.p1 - 1.0) <= 1e-5,
                       "P0+P1-1 = " + fmt(last.p0 + last.p1 - 1.0));
            c4.require(elapsed < 60.0, "took " + fmt(elapsed) + " s (limit 60)");
            if (c4.pass) {
                c4.detail = "P1 within " + fmt(rel) + ", norm drift " + fmt(drift) + ", " +
                            fmt(elapsed) + " s";
            }
        } catch (const std::exception& e) {
            c4.require(false, e.what());
        }
        results.emplace_back("time-dependent evolution reproduces P1", c4);
    }

    {
        Check c5;
        try {
            const double y_m = classical_amplitude_analytic(preset, window);
            const double amp = fitted_y_amplitude(coarse.history, preset, window);
            const double rel = std::abs(amp - y_m) / y_m;
            c5.require(rel <= 0.02, "mean displacement amplitude off by " + fmt(rel));

            const double r1 = ehrenfest_residual(coarse.history, preset, window);
            c5.require(r1 < 1e-6, "consistency residual " + fmt(r1));
            fine = drive_tdse(preset, window, 5e-4, 10);
            const double r2 = ehrenfest_residual(fine.history, preset, window);
            const double ratio = r1 / r2;
            c5.require(ratio > 3.0 && ratio < 5.0,
                       "residual ratio on dt halving " + fmt(ratio) + " not ~4");
            if (c5.pass) {
                c5.detail = "amplitude within " + fmt(rel) + ", residual " + fmt(r1) +
                            ", halving ratio " + fmt(ratio);
            }
        } catch (const std::exception& e) {
            c5.require(false, e.what());
        }
        results.emplace_back("mean motion follows the classical drive", c5);
    }

    {
        Check c6;
        try {
            const double k0 = preset.m * preset.v / preset.hbar;
            const double p1_driven = p1_partial(preset, window).p1;
            const double p1_scatter = p1_full(preset, window, k0).p1;
            const double rel = std::abs(p1_scatter - p1_driven) / p1_driven;
            c6.require(rel < 0.05, "cross-treatment gap " + fmt(rel));
            const double p1_approx = p1_full(preset, window, k0, true).p1;
            c6.require(p1_approx == p1_driven,
                       "small-shift substitution is not exact: " + fmt(p1_approx) + " vs " +
                           fmt(p1_driven));
            const auto kin = scattered_wavenumber(k0, preset);
            const double k1_rel = std::abs(kin.k1 - std::sqrt(47.0)) / std::sqrt(47.0);
            c6.require(k1_rel <= 1e-15, "k1 off sqrt(47) by " + fmt(k1_rel));
            if (c6.pass) c6.detail = "gap " + fmt(rel) + ", substitution exact, k1 = sqrt(47)";
        } catch (const std::exception& e) {
            c6.require(false, e.what());
        }
        results.emplace_back("two quantum treatments agree in the classical limit", c6);
    }

    {
        Check c7;
        const auto start = std::chrono::steady_clock::now();
        try {
            const FinalStateAmplitudes state = build_final_state(preset, window, 7.0);
            const auto at_node = measure_oscillator_position(state, 0.0, preset);
            c7.require(at_node.probability == 0.0,
                       "P(k1 | y'=0) = " + fmt(at_node.probability));
            c7.require(std::abs(std::norm(state.c0) + std::norm(state.c1) - 1.0) <= 1e-12,
                       "branch weights do not sum to 1");
            const double y_star = crossover_position(state, preset);
            const auto balanced = measure_oscillator_position(state, y_star, preset);
            c7.require(std::abs(balanced.probability - 0.5) <= 1e-9,
                       "weight at crossover " + fmt(balanced.probability));
            c7.require(std::abs(detail::branch_weight_ratio(state, y_star, preset) - 1.0) <= 1e-12,
                       "posterior ratio at crossover not 1");

            // Statistics on an amplified state, |c1|^2 = 0.2.
            FinalStateAmplitudes boosted;
            boosted.c0 = std::sqrt(0.8);
            boosted.c1 = {0.0, std::sqrt(0.2)};
            boosted.k0 = 7.0;
            boosted.k1 = std::sqrt(47.0);
            const std::size_t n = 1000000;
            const auto first =
                sample_joint_measurement(boosted, 314159, MeasurementOrder::beam_first, n, preset);
            const auto second = sample_joint_measurement(boosted, 271828,
                                                         MeasurementOrder::oscillator_first, n,
                                                         preset);
            const double sd = std::sqrt(0.2 * 0.8 / static_cast<double>(n));
            for (const auto* run : {&first, &second}) {
                const double freq =
                    static_cast<double>(run->count_k1) / static_cast<double>(n);
                c7.require(std::abs(freq - 0.2) <= 3.0 * sd,
                           "branch frequency " + fmt(freq) + " outside 3 sigma of 0.2");
            }

            // Order independence: two-sample homogeneity on the joint law at
            // the 0.01 significance level.
            const double sigma = preset.oscillator_length();
            constexpr int y_bins = 14;
            const auto bin_of = [&](const JointSample& s) {
                const double u = s.y / sigma;
                int b;
                if (u < -4.0) {
                    b = 0;
                } else if (u >= 4.0) {
                    b = y_bins - 1;
                } else {
                    b = 1 + static_cast<int>((u + 4.0) / (8.0 / 12.0));
                }
                return s.branch * y_bins + b;
            };
            std::vector<double> h1(2 * y_bins, 0.0), h2(2 * y_bins, 0.0);
            for (const auto& s : first.samples) h1[static_cast<std::size_t>(bin_of(s))] += 1.0;
            for (const auto& s : second.samples) h2[static_cast<std::size_t>(bin_of(s))] += 1.0;
            double chi2 = 0.0;
            int cells = 0;
            for (std::size_t i = 0; i < h1.size(); ++i) {
                if (h1[i] + h2[i] == 0.0) continue;
                chi2 += (h1[i] - h2[i]) * (h1[i] - h2[i]) / (h1[i] + h2[i]);
                ++cells;
            }
            const double dof = cells - 1;
            const double a = 2.0 / (9.0 * dof);
            const double wh = 1.0 - a + 2.3263478740408408 * std::sqrt(a);
            const double threshold = dof * wh * wh * wh;
            c7.require(chi2 < threshold, "joint-law chi2 " + fmt(chi2) + " over threshold " +
                                             fmt(threshold) + " (dof " + fmt(dof) + ")");
            const double elapsed = seconds_since(start);
            c7.require(elapsed < 30.0, "took " + fmt(elapsed) + " s (limit 30)");
            if (c7.pass) {
                c7.detail = "projection exact, Born frequencies in 3 sigma, chi2 " + fmt(chi2) +
                            " < " + fmt(threshold) + ", " + fmt(elapsed) + " s";
            }
        } catch (const std::exception& e) {
            c7.require(false, e.what());
        }
        results.emplace_back("partial projection and Born-rule sampling", c7);
    }

    {
        Check c8;
        try {
            const fs::path root = fs::temp_directory_path() / "beamosc_acceptance";
            fs::remove_all(root);
            fs::create_directories(root);
            const fs::path log = root / "cli.log";

            const std::map<std::string, std::string> configs = {
                {"classical", "sweep.v_list = 3, 7\n"},
                {"partial", "numerics.dt = 2e-3\n"},
                {"full", ""},
                {"measure", "numerics.n_samples = 10000\n"},
                {"sweep", "sweep.v_list = 1, 3, 7, 15\nnumerics.dt = 2e-3\n"},
                {"compare", "numerics.dt = 2e-3\n"},
            };
            for (const auto& [scenario, extra] : configs) {
                const fs::path cfg = root / (scenario + ".cfg");
                std::ofstream(cfg) << "v = 7\nnumerics.seed = 12345\n" << extra;
                const fs::path out_a = root / (scenario + "_a");
                const fs::path out_b = root / (scenario + "_b");
                const int rc_a = run_cli(cli, scenario, cfg, out_a, log);
                const int rc_b = run_cli(cli, scenario, cfg, out_b, log);
                if (rc_a != 0 || rc_b != 0) {
                    c8.require(false, scenario + " exited nonzero");
                    continue;
                }
                const auto files_a = snapshot_dir(out_a);
                const auto files_b = snapshot_dir(out_b);
                c8.require(!files_a.empty(), scenario + " produced no files");
                c8.require(files_a.size() == files_b.size(),
                           scenario + " produced different file sets");
                for (const auto& [name, bytes] : files_a) {
                    const auto it = files_b.find(name);
                    if (it == files_b.end()) {
                        c8.require(false, scenario + "/" + name + " missing in second run");
                    } else if (it->second != bytes) {
                        c8.require(false, scenario + "/" + name + " differs between runs");
                    }
                }
            }
            if (c8.pass) {
                c8.detail = "all six scenarios byte-identical across repeated runs";
                fs::remove_all(root);
            }
        } catch (const std::exception& e) {
            c8.require(false, e.what());
        }
        results.emplace_back("repeated runs are byte-identical", c8);
    }

    bool all_pass = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [name, check] = results[i];
        all_pass = all_pass && check.pass;
        std::cout << "criterion " << (i + 1) << " [" << (check.pass ? "PASS" : "FAIL") << "] "
                  << name << (check.detail.empty() ? "" : ": " + check.detail) << "\n";
    }
    std::cout << (all_pass ? "acceptance: all criteria satisfied"
                           : "acceptance: at least one criterion failed")
              << "\n";
    return all_pass ? 0 : 1;
}
