#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "dispersion.hpp"
#include "echo.hpp"
#include "equilibrium.hpp"
#include "error.hpp"
#include "gevrey.hpp"
#include "grid.hpp"
#include "perturbation.hpp"
#include "vlasov.hpp"

namespace landau {

using json = nlohmann::ordered_json;

namespace detail {

inline json toml_to_json(const toml::node& n) {
    if (auto t = n.as_table()) {
        json j = json::object();
        for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
        return j;
    }
    if (auto a = n.as_array()) {
        json j = json::array();
        for (auto&& v : *a) j.push_back(toml_to_json(v));
        return j;
    }
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    if (auto v = n.as_string()) return v->get();
    fail(ErrorKind::config, "unsupported TOML value type (dates are not accepted)");
}

} // namespace detail

// TOML config, or a manifest.json whose "config" member is a resolved config
inline json load_config_tree(const std::filesystem::path& p) {
    std::ifstream in(p);
    require(in.good(), ErrorKind::config, "cannot read config " + p.string());
    if (p.extension() == ".json") {
        json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            fail(ErrorKind::config, "invalid JSON in " + p.string() + ": " + e.what());
        }
        if (j.contains("config")) return j["config"];
        return j;
    }
    try {
        std::stringstream ss;
        ss << in.rdbuf();
        return detail::toml_to_json(toml::parse(ss.str(), p.string()));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error in " << p.string() << ": " << e.description() << " at line "
           << e.source().begin.line;
        fail(ErrorKind::config, os.str());
    }
}

// Reads one section, records every value it resolved (defaults included) and
// rejects keys it never asked for.
class Section {
public:
    Section(const json& root, std::string name, bool required, json& resolved)
        : name_(std::move(name)), resolved_(resolved[name_]) {
        if (!root.contains(name_)) {
            require(!required, ErrorKind::config, "missing [" + name_ + "] section");
            node_ = json::object();
        } else {
            node_ = root.at(name_);
            require(node_.is_object(), ErrorKind::config, "[" + name_ + "] must be a table");
        }
        resolved_ = json::object();
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    template <class T>
    T get(const std::string& key, T def) {
        seen_.insert(key);
        T v = def;
        if (node_.contains(key)) v = convert<T>(key);
        resolved_[key] = v;
        return v;
    }

    template <class T>
    T need(const std::string& key) {
        seen_.insert(key);
        require(node_.contains(key), ErrorKind::config, "missing key " + path(key));
        T v = convert<T>(key);
        resolved_[key] = v;
        return v;
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }
    void record(const std::string& key, json v) { resolved_[key] = std::move(v); }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            require(seen_.count(it.key()) > 0, ErrorKind::config, "unknown key " + path(it.key()));
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

private:
    template <class T>
    T convert(const std::string& key) const {
        const auto& v = node_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                require(v.is_number(), ErrorKind::config, "key " + path(key) + " must be a number");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                require(v.is_number_integer() || (v.is_number() && std::floor(v.get<double>()) == v.get<double>()),
                        ErrorKind::config, "key " + path(key) + " must be an integer");
                return static_cast<T>(v.get<double>());
            }
            return v.get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(ErrorKind::config, "key " + path(key) + " has the wrong type");
        }
    }

    std::string name_;
    json node_;
    json& resolved_;
    std::set<std::string> seen_;
};

struct ExperimentConfig {
    std::string experiment;
    long seed = 0;
    json resolved;

    PhaseGrid grid;
    Equilibrium eq;
    Interaction W;
    GevreySchedule schedule;
    SimConfig sim;
    bool write_snapshots = true;

    // volterra
    double volterra_dt = 0.05, volterra_horizon = 40;
    std::vector<int> volterra_modes;
    double fit_t0 = 10, fit_t1 = 40;

    // penrose
    MarginOptions margin;
    RootBox root_box;
    bool find_roots = true;

    EchoSetup echo;

    EchoKernelConfig kernel;
    SweepOptions sweep;
    std::vector<double> sweep_s{0.45, 0.25};
    std::vector<double> sweep_T{1e2, 1e3, 1e4};
    // horizons for exponents at or below the critical one; those moments grow
    // fast and each extra decade costs far more quadrature
    std::vector<double> sweep_T_subcritical{1e2, 1e3};
    double sweep_gamma = 1.0;
};

namespace detail {

inline Equilibrium read_equilibrium(Section& s, int d, const std::filesystem::path& base) {
    const auto kind = s.get<std::string>("kind", "maxwellian");
    if (kind == "maxwellian") return make_maxwellian(s.get<double>("theta", 1.0), d);
    if (kind == "two_stream") return make_two_stream(s.need<double>("v0"), s.get<double>("theta", 1.0), d);
    if (kind == "custom") {
        require(d == 1, ErrorKind::config, "equilibrium.kind = custom needs d = 1");
        const auto file = s.need<std::string>("table");
        auto p = std::filesystem::path(file);
        if (p.is_relative()) p = base / p;
        std::ifstream in(p);
        require(in.good(), ErrorKind::config, "cannot read equilibrium.table " + p.string());
        std::vector<double> v, f;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '.')) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double a, b;
            if (ls >> a >> b) {
                v.push_back(a);
                f.push_back(b);
            }
        }
        require(v.size() >= 8, ErrorKind::config, "equilibrium.table needs at least 8 rows");
        const double h = (v.back() - v.front()) / (v.size() - 1);
        for (std::size_t i = 1; i < v.size(); ++i)
            require(std::abs(v[i] - v[i - 1] - h) < 1e-9 * std::max(1.0, std::abs(h)), ErrorKind::config,
                    "equilibrium.table must use a uniform v grid");
        return make_custom(f, v.front(), h);
    }
    fail(ErrorKind::config, "equilibrium.kind must be maxwellian, two_stream or custom (got '" + kind + "')");
}

inline double default_velocity_width(const Equilibrium& eq) { return eq.v_max(); }

} // namespace detail

inline ExperimentConfig parse_config(const json& root, const std::string& experiment,
                                     const std::filesystem::path& base = ".") {
    require(root.is_object(), ErrorKind::config, "config root must be a table");
    ExperimentConfig c;
    c.experiment = experiment;
    json& R = c.resolved;
    R = json::object();
    std::set<std::string> known{"experiment", "seed", "grid", "equilibrium", "interaction", "gevrey",
                                "run", "volterra", "penrose", "echo", "sweep"};
    for (auto it = root.begin(); it != root.end(); ++it)
        require(known.count(it.key()) > 0, ErrorKind::config, "unknown section or key '" + it.key() + "'");
    if (root.contains("experiment")) {
        require(root["experiment"].is_string() && root["experiment"].get<std::string>() == experiment,
                ErrorKind::config, "config is for experiment '" + root["experiment"].dump() + "', not '" + experiment + "'");
    }
    R["experiment"] = experiment;
    if (root.contains("seed")) {
        require(root["seed"].is_number_integer(), ErrorKind::config, "seed must be an integer");
        c.seed = root["seed"].get<long>();
    }
    R["seed"] = c.seed;

    const bool needs_grid = experiment == "simulate" || experiment == "echo";
    const bool needs_physics = experiment != "kernel-sweep";

    int d = 1;
    json grid_node;
    if (needs_physics) {
        // the equilibrium fixes the default velocity width, so read it before the grid
        Section eqs(root, "equilibrium", true, R);
        {
            const json& gn = root.contains("grid") ? root["grid"] : json::object();
            if (gn.contains("d")) {
                require(gn["d"].is_number_integer(), ErrorKind::config, "key grid.d must be an integer");
                d = gn["d"].get<int>();
            }
        }
        c.eq = detail::read_equilibrium(eqs, d, base);
        eqs.finish();

        Section gs(root, "grid", needs_grid, R);
        d = gs.get<int>("d", 1);
        if (needs_grid) {
            const auto Nx = gs.need<long>("Nx");
            const auto Nv = gs.need<long>("Nv");
            const double V = gs.get<double>("V", detail::default_velocity_width(c.eq));
            require(Nx > 0 && Nv > 0, ErrorKind::config, "grid.Nx and grid.Nv must be positive");
            c.grid = make_grid(d, static_cast<std::size_t>(Nx), static_cast<std::size_t>(Nv), V);
        }
        gs.finish();

        Section is(root, "interaction", true, R);
        c.W = make_interaction(is.get<double>("A", 1.0), is.get<double>("gamma", 1.0), is.get<int>("sign", 1));
        is.finish();
    }

    {
        Section gv(root, "gevrey", false, R);
        const double s = gv.get<double>("s", 0.5), l0 = gv.get<double>("lambda0", 1.0),
                     lp = gv.get<double>("lambda_prime", 0.5), sg = gv.get<double>("sigma", 0.0),
                     be = gv.get<double>("beta", 3.0);
        const int M = gv.get<int>("M", 1);
        const double cap = gv.get<double>("log_cap", 700.0);
        gv.finish();
        if (experiment != "kernel-sweep") {
            c.schedule = make_schedule(s, l0, lp, sg, be, M, c.W.gamma);
            c.schedule.log_cap = cap;
            require(M > d / 2.0, ErrorKind::config, "gevrey.M must exceed d/2");
        } else {
            c.schedule = GevreySchedule{s, l0, lp, sg, be, M, 1.0};
            validate_shape(c.schedule);
        }
    }

    if (experiment == "simulate" || experiment == "echo") {
        Section rs(root, "run", experiment == "simulate", R);
        auto& S = c.sim;
        S.setup = SolverSetup{c.grid, c.eq, c.W, rs.get<bool>("linearized", false), {}};
        S.schedule = c.schedule;
        S.dt = rs.get<double>("dt", 0.0);
        S.horizon = rs.get<double>("horizon", 0.0);
        S.diag_stride = rs.get<int>("diag_stride", 1);
        S.snapshot_stride = rs.get<int>("snapshot_stride", 0);
        S.alarm_threshold = rs.get<double>("alarm_threshold", 1e-6);
        S.alarm_band = rs.get<double>("alarm_band", 0.9);
        S.abort_on_alarm = rs.get<bool>("abort_on_alarm", true);
        S.sobolev_order = rs.get<int>("sobolev_order", 2);
        c.write_snapshots = rs.get<bool>("write_snapshots", true);
        S.setup.filter.on = rs.get<bool>("filter", false);
        S.setup.filter.strength = rs.get<double>("filter_strength", 36.0);
        S.setup.filter.order = rs.get<int>("filter_order", 8);
        require(S.dt >= 0 && S.horizon >= 0, ErrorKind::config, "run.dt and run.horizon must be non-negative");
        require(S.alarm_band > 0 && S.alarm_band < 1, ErrorKind::config, "run.alarm_band must lie in (0, 1)");
        S.perturbation.eps = rs.get<double>("eps", 0.0);
        json modes = json::array();
        if (rs.has("perturbation")) {
            const auto& arr = rs.raw("perturbation");
            require(arr.is_array(), ErrorKind::config, "run.perturbation must be an array of tables");
            for (const auto& m : arr) {
                require(m.is_object(), ErrorKind::config, "run.perturbation entries must be tables");
                for (auto it = m.begin(); it != m.end(); ++it)
                    require(std::set<std::string>{"k", "re", "im", "theta", "u"}.count(it.key()) > 0,
                            ErrorKind::config, "unknown key run.perturbation." + it.key());
                require(m.contains("k") && m["k"].is_number_integer(), ErrorKind::config,
                        "run.perturbation.k must be an integer");
                auto num = [&](const char* key, double def) {
                    if (!m.contains(key)) return def;
                    require(m[key].is_number(), ErrorKind::config,
                            std::string("run.perturbation.") + key + " must be a number");
                    return m[key].get<double>();
                };
                ModeProfile p;
                p.k = m["k"].get<int>();
                p.c = {num("re", 1.0), num("im", 0.0)};
                p.theta = num("theta", 1.0);
                p.u = num("u", 0.0);
                S.perturbation.modes.push_back(p);
                modes.push_back({{"k", p.k}, {"re", p.c.real()}, {"im", p.c.imag()}, {"theta", p.theta}, {"u", p.u}});
            }
        }
        rs.record("perturbation", modes);
        validate(S.perturbation);
        rs.finish();
    }

    if (experiment == "volterra") {
        Section vs(root, "volterra", false, R);
        c.volterra_dt = vs.get<double>("dt", 0.05);
        c.volterra_horizon = vs.get<double>("horizon", 40.0);
        c.fit_t0 = vs.get<double>("fit_t0", 10.0);
        c.fit_t1 = vs.get<double>("fit_t1", c.volterra_horizon);
        auto modes = vs.get<std::vector<int>>("modes", {1});
        c.volterra_modes = modes;
        c.sim.perturbation.eps = vs.get<double>("eps", 1e-3);
        const double th = vs.get<double>("profile_theta", 1.0);
        for (int k : modes) {
            require(k > 0, ErrorKind::config, "volterra.modes must be positive integers");
            c.sim.perturbation.modes.push_back({k, {1.0, 0.0}, th, 0.0});
        }
        require(c.volterra_dt > 0 && c.volterra_horizon > 0, ErrorKind::config, "volterra.dt and volterra.horizon must be positive");
        vs.finish();
    }

    if (experiment == "penrose") {
        Section ps(root, "penrose", false, R);
        auto& m = c.margin;
        m.k_max = ps.get<int>("k_max", 8);
        m.lambda_bar = ps.get<double>("lambda_bar", 0.05);
        m.mu_min = ps.get<double>("mu_min", -1.0);
        m.Z = ps.get<double>("Z", 10.0);
        m.n_mu = ps.get<int>("n_mu", 8);
        m.n_zeta = ps.get<int>("n_zeta", 401);
        m.kappa_min = ps.get<double>("kappa_min", 1e-3);
        c.find_roots = ps.get<bool>("roots", true);
        c.root_box.mu_lo = ps.get<double>("root_mu_lo", -3.0);
        c.root_box.mu_hi = ps.get<double>("root_mu_hi", 3.0);
        c.root_box.Z = ps.get<double>("root_Z", 6.0);
        require(m.k_max >= 1, ErrorKind::config, "penrose.k_max must be >= 1");
        ps.finish();
    }

    if (experiment == "echo") {
        Section es(root, "echo", false, R);
        auto& e = c.echo;
        e.source_mode = es.get<int>("source_mode", 2);
        e.target_mode = es.get<int>("target_mode", 1);
        e.tau_kick = es.get<double>("tau_kick", 10.0);
        e.eps = es.get<double>("eps", 1e-3);
        e.profile_theta = es.get<double>("profile_theta", 1.0);
        require(e.source_mode > e.target_mode && e.target_mode >= 1, ErrorKind::config,
                "echo.source_mode must exceed echo.target_mode >= 1");
        aligned_steps(c.grid, e.tau_kick);
        e.sim = c.sim;
        es.finish();
    }

    if (experiment == "kernel-sweep") {
        Section ss(root, "sweep", false, R);
        c.sweep_gamma = ss.get<double>("gamma", 1.0);
        c.sweep_s = ss.get<std::vector<double>>("s_list", {0.45, 0.25});
        c.sweep_T = ss.get<std::vector<double>>("horizons", {1e2, 1e3, 1e4});
        c.sweep_T_subcritical = ss.get<std::vector<double>>("subcritical_horizons", {1e2, 1e3});
        c.sweep.lambda0 = ss.get<double>("lambda0", 48.0);
        c.sweep.lambda_prime = ss.get<double>("lambda_prime", 4.0);
        c.sweep.a0 = ss.get<double>("a0", 0.05);
        c.kernel.c = ss.get<double>("c", 0.9);
        c.kernel.delta = ss.get<double>("delta", 0.0);
        c.kernel.k_list = ss.get<std::vector<int>>("k_list", c.kernel.k_list);
        c.kernel.l_window = ss.get<int>("l_window", 40);
        require(c.sweep_gamma >= 1, ErrorKind::config, "sweep.gamma must be >= 1");
        require(c.sweep.lambda0 > c.sweep.lambda_prime && c.sweep.lambda_prime > 0, ErrorKind::config,
                "sweep: need lambda0 > lambda_prime > 0");
        require(c.kernel.c > 0 && c.kernel.c < 1, ErrorKind::config, "sweep.c must lie in (0, 1)");
        require(c.kernel.l_window >= 1, ErrorKind::config, "sweep.l_window must be >= 1");
        for (double s : c.sweep_s) require(s > 0 && s < 1, ErrorKind::config, "sweep.s_list entries must lie in (0, 1)");
        for (double T : c.sweep_T_subcritical) require(T > 0, ErrorKind::config, "sweep.subcritical_horizons must be positive");
        for (double T : c.sweep_T) require(T > 0, ErrorKind::config, "sweep.horizons must be positive");
        for (int k : c.kernel.k_list) require(k >= 1, ErrorKind::config, "sweep.k_list entries must be >= 1");
        c.kernel.schedule = c.schedule;
        c.kernel.schedule.lambda0 = c.sweep.lambda0;
        c.kernel.schedule.lambda_prime = c.sweep.lambda_prime;
        c.kernel.gamma = c.sweep_gamma;
        ss.finish();
    }
    return c;
}

} // namespace landau
