// landau-lab: command-line front end for the Landau damping toolkit.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include <landau/landau.hpp>

namespace fs = std::filesystem;
using namespace landau;

namespace {

enum Exit { ok = 0, config_error = 2, resolution_alarm = 3, numerical_failure = 4 };

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::config:
    case ErrorKind::grid_mismatch:
    case ErrorKind::subcritical_exponent:
    case ErrorKind::off_lattice:
    case ErrorKind::inadmissible:
        return config_error;
    case ErrorKind::under_resolved:
    case ErrorKind::resolution_alarm:
    case ErrorKind::unresolved_critical_point:
        return resolution_alarm;
    case ErrorKind::non_convergent:
    case ErrorKind::instability:
    case ErrorKind::numerical_failure:
    case ErrorKind::not_decayed:
        return numerical_failure;
    }
    return numerical_failure;
}

int exit_code(RunStatus s) {
    switch (s) {
    case RunStatus::ok: return ok;
    case RunStatus::resolution_alarm: return resolution_alarm;
    case RunStatus::numerical_failure: return numerical_failure;
    }
    return numerical_failure;
}

const char* to_string(RunStatus s) {
    switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::resolution_alarm: return "resolution_alarm";
    case RunStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

struct Context {
    fs::path out;
    bool quiet = false;
    ExperimentConfig cfg;
    json summary = json::object();
    std::vector<std::string> outputs;

    using Meta = std::vector<std::pair<std::string, std::string>>;
    Meta meta() const {
        return {{"landau-lab", version}, {"experiment", cfg.experiment}, {"config", cfg.resolved.dump()}};
    }
    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return out / name;
    }
    void say(const std::string& s) const {
        if (!quiet) std::cout << s << '\n';
    }
};

void write_json(const fs::path& p, const json& j) {
    std::ofstream o(p);
    require(o.good(), ErrorKind::config, "cannot write " + p.string());
    o << j.dump(2) << '\n';
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

// ----------------------------------------------------------------- simulate

int cmd_simulate(Context& c) {
    auto sc = c.cfg.sim;
    const bool snaps = c.cfg.write_snapshots;
    if (snaps && sc.snapshot_stride == 0) sc.snapshot_stride = std::max(1, static_cast<int>(
        std::lround(validity_horizon(sc.setup.grid) / (sc.setup.grid.deta() * sc.diag_stride) / 16)));
    const auto r = run_simulation(sc);

    const auto& S = sc.schedule;
    {
        CsvWriter w(c.file("density.csv"), c.meta(), {"t", "k", "re", "im", "abs", "A_abs"});
        for (std::size_t n = 0; n < r.density.n_times; ++n) {
            const double t = r.density.t(n);
            for (std::size_t i = 0; i < r.density.modes.size(); ++i) {
                const int k = r.density.modes[i];
                const cplx z = r.density.values[i][n];
                w << t << k << z.real() << z.imag() << std::abs(z)
                  << gevrey_weight(S, t, k, k * t) * std::abs(z);
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(c.file("bootstrap.csv"), c.meta(),
                    {"t", "norm_A_rho", "Q1", "Q1_scaled", "Q2", "Q3", "boundary_fraction", "dropped", "capped",
                     "sobolev", "bracket_sobolev", "mass", "casimir"});
        for (const auto& b : r.bootstrap) {
            w << b.t << b.norm_Arho << b.Q1 << b.Q1_scaled << b.Q2 << b.Q3 << b.boundary_fraction << b.dropped
              << b.capped << b.sobolev << b.bracket_sobolev << b.mass << b.casimir;
            w.end_row();
        }
    }
    if (snaps) {
        fs::create_directories(c.out / "snapshots");
        auto put = [&](const FieldSpectrum& s) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshots/t_%012.6f.bin", s.t);
            write_snapshot(c.file(name), s);
        };
        bool final_written = false;
        for (const auto& s : r.snapshots) {
            put(s.lab);
            final_written = final_written || s.t == r.final_state.t;
        }
        if (!final_written) put(r.final_state.lab);
    }
    c.summary["status"] = to_string(r.status);
    c.summary["message"] = r.message;
    c.summary["dt"] = r.dt;
    c.summary["horizon"] = r.horizon;
    c.summary["validity_horizon"] = r.validity_horizon;
    c.summary["final_time"] = r.final_state.t;
    c.summary["initial_gevrey_norm"] = r.initial_gevrey_norm;
    c.say("simulate: " + std::string(to_string(r.status)) + ", reached t = " + fmt17(r.final_state.t) +
          " (validity horizon " + fmt17(r.validity_horizon) + ")");
    if (!r.message.empty()) c.say("  " + r.message);
    return exit_code(r.status);
}

// ----------------------------------------------------------------- volterra

int cmd_volterra(Context& c) {
    const auto& C = c.cfg;
    const auto tr = linear_density(C.sim.perturbation, C.eq, C.W, C.volterra_horizon, C.volterra_dt);
    auto meta = c.meta();
    json rates = json::object();
    for (int k : tr.modes) {
        const double t1 = std::min(C.fit_t1, tr.t(tr.n_times - 1));
        const double rate = C.fit_t0 < t1 ? fitted_log_slope(tr.mode(k), tr.dt, C.fit_t0, t1) : 0.0;
        rates[std::to_string(k)] = rate;
        meta.emplace_back("fitted_rate_k" + std::to_string(k), fmt17(rate));
        c.say("volterra: k = " + std::to_string(k) + " fitted log|rho| slope on [" + fmt17(C.fit_t0) + ", " +
              fmt17(t1) + "] = " + fmt17(rate));
    }
    CsvWriter w(c.file("volterra.csv"), meta, {"t", "k", "re", "im", "abs", "A_abs"});
    for (std::size_t n = 0; n < tr.n_times; ++n)
        for (std::size_t i = 0; i < tr.modes.size(); ++i) {
            const cplx z = tr.values[i][n];
            const int k = tr.modes[i];
            w << tr.t(n) << k << z.real() << z.imag() << std::abs(z)
              << gevrey_weight(C.schedule, tr.t(n), k, k * tr.t(n)) * std::abs(z);
            w.end_row();
        }
    c.summary["fitted_rates"] = rates;
    for (std::size_t i = 0; i < tr.modes.size(); ++i)
        for (auto z : tr.values[i])
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                c.summary["status"] = "numerical_failure";
                return numerical_failure;
            }
    c.summary["status"] = "ok";
    return ok;
}

// ------------------------------------------------------------------ penrose

int cmd_penrose(Context& c) {
    const auto& C = c.cfg;
    json j = json::object();
    const auto ks = mode_set(C.eq.d, C.margin.k_max);
    const auto pr = penrose_check(C.eq, C.W, ks);
    json modes = json::array();
    for (const auto& m : pr.modes) {
        json pts = json::array();
        for (const auto& p : m.points) pts.push_back({{"w", p.w}, {"pv", p.pv}, {"value", p.value}});
        modes.push_back({{"k", {m.k[0], m.k[1]}}, {"pass", m.pass}, {"critical_points", pts}});
    }
    j["penrose"] = {{"pass", pr.pass}, {"modes", modes}};

    const auto mr = condition_L_margin(C.eq, C.W, C.margin);
    j["margin"] = {{"kappa", mr.kappa},
                   {"label", mr.label},
                   {"sampled_min", mr.sampled_min},
                   {"argmin_k", {mr.argmin_k[0], mr.argmin_k[1]}},
                   {"argmin_xi", cplx_json(mr.argmin_xi)},
                   {"tail_zeta", mr.tail_zeta},
                   {"tail_k", mr.tail_k},
                   {"winding", mr.winding},
                   {"unstable_root", mr.unstable_root},
                   {"warning", mr.warning}};

    if (C.find_roots) {
        json roots = json::array();
        for (const auto& k : ks) {
            if (k[0] <= 0 && k[1] <= 0) continue;
            const auto rs = find_dispersion_roots(C.eq, C.W, k, C.root_box);
            json list = json::array();
            for (const auto& r : rs.roots)
                list.push_back({{"xi", cplx_json(r.xi)},
                                {"growth_rate", r.growth_rate},
                                {"frequency", r.frequency},
                                {"residual", r.residual}});
            roots.push_back({{"k", {k[0], k[1]}}, {"roots", list}, {"failed_seeds", rs.failed_seeds.size()}});
        }
        j["roots"] = roots;
    }
    write_json(c.file("penrose.json"), j);
    c.summary["penrose_pass"] = pr.pass;
    c.summary["kappa"] = mr.kappa;
    c.summary["unstable_root"] = mr.unstable_root;
    c.summary["status"] = "ok";
    c.say(std::string("penrose: ") + (pr.pass ? "stable" : "unstable") + ", kappa = " + fmt17(mr.kappa) + " (" +
          mr.label + ")" + (mr.warning ? "  [warning: margin below kappa_min]" : ""));
    return ok;
}

// --------------------------------------------------------------------- echo

int cmd_echo(Context& c) {
    const auto r = run_echo_experiment(c.cfg.echo);
    auto meta = c.meta();
    meta.emplace_back("predicted_time", fmt17(r.predicted_time));
    meta.emplace_back("detected", r.detected ? "true" : "false");
    meta.emplace_back("echo_time", fmt17(r.echo_time));
    meta.emplace_back("amplitude", fmt17(r.amplitude));
    CsvWriter w(c.file("echo.csv"), meta, {"t", "abs_rho"});
    for (std::size_t n = 0; n < r.t.size(); ++n) {
        w << r.t[n] << r.rho_abs[n];
        w.end_row();
    }
    c.summary["status"] = to_string(r.status);
    c.summary["message"] = r.message;
    c.summary["detected"] = r.detected;
    c.summary["predicted_time"] = r.predicted_time;
    c.summary["echo_time"] = r.echo_time;
    c.summary["amplitude"] = r.amplitude;
    c.say("echo: predicted t = " + fmt17(r.predicted_time) +
          (r.detected ? ", detected at t = " + fmt17(r.echo_time) + " with |rho| = " + fmt17(r.amplitude)
                      : ", not detected"));
    return exit_code(r.status);
}

// ------------------------------------------------------------- kernel sweep

int cmd_sweep(Context& c) {
    const auto& C = c.cfg;
    SweepResult all;
    for (double s : C.sweep_s) {
        const auto& T = radius_exponent(s, C.sweep_gamma) > 0 ? C.sweep_T : C.sweep_T_subcritical;
        auto r = critical_exponent_sweep(C.kernel, C.sweep_gamma, {s}, T, C.sweep);
        all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
        all.classes.insert(all.classes.end(), r.classes.begin(), r.classes.end());
    }
    auto meta = c.meta();
    meta.emplace_back("critical_exponent", fmt17(critical_exponent(C.sweep_gamma)));
    for (const auto& k : all.classes) meta.emplace_back("class_s" + fmt17(k.s), k.label);
    CsvWriter w(c.file("sweep.csv"), meta, {"s", "T", "sup_moment", "argmax_k", "a", "surrogate_schedule", "tail_flagged"});
    for (const auto& r : all.rows) {
        w << r.s << r.T << r.sup_moment << r.argmax_k << r.a << (r.surrogate_schedule ? 1 : 0) << (r.tail_flagged ? 1 : 0);
        w.end_row();
    }
    json cls = json::array();
    for (const auto& k : all.classes) {
        cls.push_back({{"s", k.s}, {"label", k.label}, {"drift", k.drift}, {"first_ratio", k.first_ratio}});
        c.say("kernel-sweep: s = " + fmt17(k.s) + " -> " + k.label + " (drift " + fmt17(k.drift) + ", ratio " +
              fmt17(k.first_ratio) + ")");
    }
    c.summary["classes"] = cls;
    c.summary["status"] = "ok";
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"landau-lab: linear and nonlinear Landau damping experiments"};
    app.require_subcommand(1);
    int threads = 0;
    std::string out_dir = "out";
    bool quiet = false;
    app.add_option("--threads", threads, "worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_option("--output", out_dir, "output directory");
    app.add_flag("--quiet", quiet, "suppress progress output");

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(Context&);
        std::string config;
        CLI::App* app = nullptr;
    };
    std::vector<Sub> subs{{"simulate", "nonlinear Vlasov run", cmd_simulate, {}},
                          {"volterra", "linear density via the Volterra equation", cmd_volterra, {}},
                          {"penrose", "Penrose criterion, stability margin and dispersion roots", cmd_penrose, {}},
                          {"echo", "two-pulse plasma echo experiment", cmd_echo, {}},
                          {"kernel-sweep", "echo-kernel moments across Gevrey exponents", cmd_sweep, {}}};
    for (auto& s : subs) {
        s.app = app.add_subcommand(s.name, s.help);
        s.app->add_option("--config", s.config, "TOML config (or a manifest.json to rerun)")->required();
        // global flags are also accepted after the subcommand
        s.app->fallthrough();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : config_error;
    }

    Sub* sub = nullptr;
    for (auto& s : subs)
        if (s.app->parsed()) sub = &s;

    Context c;
    c.out = out_dir;
    c.quiet = quiet;
    set_threads(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()));
    const auto t0 = std::chrono::steady_clock::now();
    int rc = ok;
    std::string error;
    try {
        const fs::path cfg_path = sub->config;
        c.cfg = parse_config(load_config_tree(cfg_path), sub->name, cfg_path.parent_path());
        fs::create_directories(c.out);
        rc = sub->run(c);
    } catch (const Error& e) {
        rc = exit_code(e.kind());
        error = std::string(landau::to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
        rc = numerical_failure;
        error = e.what();
    }
    if (!error.empty()) std::cerr << "landau-lab " << sub->name << ": " << error << '\n';

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        fs::create_directories(c.out);
        json m = json::object();
        m["code_version"] = version;
        m["experiment"] = sub->name;
        m["config"] = c.cfg.resolved;
        m["wall_time_s"] = wall;
        m["threads"] = threads > 0 ? threads : static_cast<int>(landau::threads());
        m["exit_code"] = rc;
        if (!error.empty()) m["error"] = error;
        m["summary"] = c.summary;
        m["outputs"] = c.outputs;
        write_json(c.out / "manifest.json", m);
    } catch (const std::exception& e) {
        std::cerr << "landau-lab: cannot write manifest: " << e.what() << '\n';
    }
    return rc;
}
