/*
 * Copyright 2026 The vsheet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vsheet/cli.hpp"

#include "vsheet/detail/parallel.hpp"
#include "vsheet/dynamics.hpp"
#include "vsheet/geometry.hpp"
#include "vsheet/io.hpp"
#include "vsheet/kernels.hpp"
#include "vsheet/oracles.hpp"
#include "vsheet/weak_forms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <set>

namespace vsheet {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& what) { throw SheetError(ErrorKind::config, what); }

/// Typed access to one JSON object of the run config. finish() rejects keys
/// that were never read, so misspelled options fail loudly.
class Section {
public:
    Section(const Json& parent, const std::string& name) : name_(name) {
        if (parent.contains(name)) {
            j_ = parent.at(name);
            if (!j_.is_object()) config_error("'" + name + "' must be a JSON object");
        } else {
            j_ = Json::object();
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    double number(const char* key, double fallback) {
        const Json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) bad(key, "a number");
        return v->get<double>();
    }

    long long integer(const char* key, long long fallback) {
        const Json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) bad(key, "an integer");
        return v->get<long long>();
    }

    bool flag(const char* key, bool fallback) {
        const Json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) bad(key, "a boolean");
        return v->get<bool>();
    }

    std::string text(const char* key, const std::string& fallback) {
        const Json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) bad(key, "a string");
        return v->get<std::string>();
    }

    std::string required_text(const char* key) {
        if (!has(key)) config_error("'" + name_ + "." + key + "' is required");
        return text(key, {});
    }

    std::vector<double> numbers(const char* key, std::vector<double> fallback) {
        const Json* v = find(key);
        if (!v) return fallback;
        std::vector<double> out;
        if (!v->is_array()) bad(key, "an array of numbers");
        for (const Json& x : *v) {
            if (!x.is_number()) bad(key, "an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<long long> integers(const char* key, std::vector<long long> fallback) {
        const Json* v = find(key);
        if (!v) return fallback;
        std::vector<long long> out;
        if (!v->is_array()) bad(key, "an array of integers");
        for (const Json& x : *v) {
            if (!x.is_number_integer()) bad(key, "an array of integers");
            out.push_back(x.get<long long>());
        }
        return out;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!used_.count(item.key())) config_error("unknown option '" + name_ + "." + item.key() + "'");
        }
    }

private:
    const Json* find(const char* key) {
        used_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    [[noreturn]] void bad(const char* key, const char* what) const {
        config_error("'" + name_ + "." + key + "' must be " + what);
    }

    std::string name_;
    Json j_;
    std::set<std::string> used_;
};

const std::set<std::string> kTopLevelKeys{"description", "seed",       "initial",     "evolution",   "quadrature",
                                          "trajectory",  "residual",   "regularity",  "convergence", "oracle_check"};

/// Runs `f`, turning any SheetError into a config error: failures while
/// building inputs are the caller's fault, not a numerical abort.
template <typename F>
auto as_input(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const SheetError& e) {
        if (e.kind() == ErrorKind::config) throw;
        throw SheetError(ErrorKind::config, what + ": " + std::string(to_string(e.kind())) + ": " + e.what());
    }
}

Index checked_count(long long v, long long minimum, const std::string& what) {
    if (v < minimum) config_error(what + " must be at least " + std::to_string(minimum));
    return static_cast<Index>(v);
}

struct Run {
    std::string command;
    Json config;
    std::string hash;
    fs::path out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    std::ostream& out;
    std::ostream& err;

    std::string path(const std::string& name) const { return (out_dir / name).string(); }
};

QuadratureSpec parse_quadrature(const Json& root) {
    Section s(root, "quadrature");
    QuadratureSpec q;
    q.scheme = as_input("quadrature.scheme", [&] { return pv_scheme_from_string(s.text("scheme", "automatic")); });
    q.epsilon = s.number("epsilon", q.epsilon);
    q.delta = s.number("delta", q.delta);
    q.refine_factor = static_cast<int>(s.integer("refine_factor", q.refine_factor));
    q.richardson = s.flag("richardson", q.richardson);
    s.finish();
    return q;
}

EvolutionConfig parse_evolution(const Json& root) {
    Section s(root, "evolution");
    EvolutionConfig cfg;
    cfg.scheme = as_input("evolution.scheme",
                          [&] { return evolution_scheme_from_string(s.text("scheme", "lagrangian")); });
    cfg.dt = s.number("dt", cfg.dt);
    cfg.t_end = s.number("t_end", cfg.t_end);
    cfg.remesh_every = static_cast<int>(s.integer("remesh_every", cfg.remesh_every));
    cfg.fourier_filter_level = s.number("fourier_filter_level", cfg.fourier_filter_level);
    cfg.output_every = static_cast<int>(s.integer("output_every", cfg.output_every));
    cfg.markers = static_cast<int>(s.integer("markers", cfg.markers));
    cfg.self_approach_fraction = s.number("self_approach_fraction", cfg.self_approach_fraction);
    s.finish();
    cfg.quadrature = parse_quadrature(root);
    as_input("evolution", [&] {
        check_config(cfg);
        return 0;
    });
    return cfg;
}

/// Initial state from the "initial" section. `n_override` > 0 replaces n.
SheetState build_initial(const Json& root, std::uint64_t seed, Index n_override = 0) {
    Section s(root, "initial");
    const std::string kind = s.text("kind", "prandtl_munk");
    Index n = checked_count(s.integer("n", 64), 2, "initial.n");
    if (n_override > 0) n = n_override;
    SheetState state;
    if (kind == "prandtl_munk") {
        state = as_input("initial", [&] { return prandtl_munk_state(n, 0.0); });
    } else if (kind == "flat_uniform" || kind == "periodic_perturbed") {
        const double length = s.number("length", 1.0);
        const double gamma = s.number("gamma", 1.0);
        const double amplitude = kind == "flat_uniform" ? 0.0 : s.number("amplitude", 0.01);
        const int k = kind == "flat_uniform" ? 1 : static_cast<int>(s.integer("wavenumber", 1));
        state = as_input("initial", [&] { return periodic_perturbed(n, length, gamma, amplitude, k); });
    } else if (kind == "segment") {
        const double length = s.number("length", 1.0);
        const double gamma = s.number("gamma", 1.0);
        state = as_input("initial", [&] { return segment_state(n, length, gamma); });
    } else if (kind == "circle") {
        const double radius = s.number("radius", 1.0);
        const double gamma = s.number("gamma", 1.0);
        const double amplitude = s.number("amplitude", 0.0);
        const int mode = static_cast<int>(s.integer("mode", 1));
        state = as_input("initial", [&] { return circle_state(n, radius, gamma, amplitude, mode); });
    } else if (kind == "random") {
        const Topology topology =
            as_input("initial.topology", [&] { return topology_from_string(s.text("topology", "closed")); });
        state = as_input("initial", [&] { return random_smooth_state(seed, n, topology); });
    } else if (kind == "file") {
        const std::string path = s.required_text("path");
        state = as_input("initial", [&] { return state_from_json(read_json_file(path)); });
    } else {
        config_error("unknown initial.kind '" + kind + "'");
    }
    s.finish();
    as_input("initial", [&] {
        validate(state);
        return 0;
    });
    return state;
}

struct TrajectoryInput {
    SheetTrajectory trajectory;
    Json info;
};

TrajectoryInput build_trajectory(const Run& run) {
    Section s(run.config, "trajectory");
    const std::string kind = s.text("kind", "simulate");
    TrajectoryInput in;
    in.info = Json{{"kind", kind}};
    if (kind == "file") {
        const std::string path = s.required_text("path");
        in.trajectory = as_input("trajectory", [&] { return read_trajectory_file(path); });
        in.info["path"] = path;
    } else if (kind == "prandtl_munk") {
        const Index n = checked_count(s.integer("n", 256), 2, "trajectory.n");
        const double t_end = s.number("t_end", 1.0);
        const double dt = s.number("dt", 0.01);
        in.trajectory = as_input("trajectory", [&] { return prandtl_munk_trajectory(n, t_end, dt); });
    } else if (kind == "initial") {
        in.trajectory.states.push_back(build_initial(run.config, run.seed));
    } else if (kind == "simulate") {
        const SheetState initial = build_initial(run.config, run.seed);
        const EvolutionConfig cfg = parse_evolution(run.config);
        SimulationResult r = simulate(initial, cfg);
        in.trajectory = std::move(r.trajectory);
        in.info["filter_level"] = cfg.fourier_filter_level;
    } else {
        config_error("unknown trajectory.kind '" + kind + "'");
    }
    s.finish();
    as_input("trajectory", [&] {
        validate(in.trajectory);
        return 0;
    });
    in.info["states"] = in.trajectory.size();
    in.info["t_end"] = in.trajectory.back().t;
    in.info["topology"] = std::string(to_string(in.trajectory.front().topology));
    return in;
}

ResidualOptions parse_residual_options(const Json& root, int* suite_size) {
    Section s(root, "residual");
    ResidualOptions o;
    *suite_size = static_cast<int>(checked_count(s.integer("suite_size", 12), 1, "residual.suite_size"));
    o.diagonal =
        as_input("residual.diagonal", [&] { return diagonal_rule_from_string(s.text("diagonal", "tangent_limit")); });
    o.floor_factor = s.number("floor_factor", o.floor_factor);
    o.levels.clear();
    for (long long v : s.integers("levels", {1, 2, 4})) o.levels.push_back(static_cast<int>(v));
    s.finish();
    for (std::size_t k = 0; k < o.levels.size(); ++k) {
        if (o.levels[k] < 1 || (k > 0 && o.levels[k] != 2 * o.levels[k - 1]))
            config_error("residual.levels must start at >= 1 and double at every step");
    }
    if (o.levels.empty()) config_error("residual.levels must not be empty");
    o.quadrature = parse_quadrature(root);
    return o;
}

Json test_function_json(const TestFunction& phi) {
    const TimeProfile& p = phi.profile();
    Json j{{"id", phi.id()},
           {"kind", std::string(to_string(phi.kind()))},
           {"center", {phi.center().x(), phi.center().y()}},
           {"radius", phi.radius()},
           {"profile",
            {{"rise_start", p.rise_start}, {"rise_end", p.rise_end}, {"fall_start", p.fall_start},
             {"fall_end", p.fall_end}}}};
    if (phi.kind() == BumpKind::linear_core) {
        j["core"] = phi.core();
        j["slope"] = {phi.slope().x(), phi.slope().y()};
        j["offset"] = phi.offset();
    }
    return j;
}

Json refinements_json(const std::vector<Refinement>& seq) {
    Json a = Json::array();
    for (const Refinement& r : seq) a.push_back({{"resolution", r.resolution}, {"residual", r.residual}});
    return a;
}

Json verdict_json(const Verdict& v) {
    return {{"extrapolated", v.extrapolated}, {"observed_order", v.observed_order}, {"floor", v.floor},
            {"converged", v.converged},       {"zero", v.zero}};
}

std::string br_label(const ResidualReport& r) { return r.br.zero ? "PASS_BR" : "FAIL_BR"; }
std::string euler_label(const ResidualReport& r) { return r.euler.zero ? "PASS_EULER" : "FAIL_EULER"; }

/// Metadata common to every command; the timestamp lives only here.
Json metadata(const Run& run) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return Json{{"command", run.command}, {"config", run.config}, {"config_hash", run.hash},
                {"seed", run.seed},       {"threads", run.threads}, {"timestamp", stamp}};
}

// simulate

int cmd_simulate(const Run& run) {
    const SheetState initial = build_initial(run.config, run.seed);
    const EvolutionConfig cfg = parse_evolution(run.config);
    const SimulationResult r = simulate(initial, cfg);
    const SheetTrajectory& traj = r.trajectory;

    write_trajectory_file(run.path("trajectory.jsonl"), traj, run.hash);

    CsvTable csv{{"index", "t", "total_circulation", "total_length", "centroid_x", "centroid_y",
                  "max_node_displacement", "max_marker_drift"},
                 {}};
    const SheetState& first = traj.front();
    double max_displacement = 0.0;
    double max_marker_drift = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const SheetState& s = traj.states[k];
        const Point2 centroid = s.xi.leftCols(s.distinct_nodes()).rowwise().mean();
        double displacement = std::numeric_limits<double>::quiet_NaN();
        if (s.size() == first.size()) displacement = (s.xi - first.xi).colwise().norm().maxCoeff();
        double drift = 0.0;
        if (!r.marker_circulation.empty() && r.marker_circulation[k].size() > 0)
            drift = (r.marker_circulation[k] - r.marker_circulation[0]).cwiseAbs().maxCoeff();
        if (std::isfinite(displacement)) max_displacement = std::max(max_displacement, displacement);
        max_marker_drift = std::max(max_marker_drift, drift);
        csv.add_row({csv_cell(static_cast<long long>(k)), csv_cell(s.t), csv_cell(r.circulation[k]),
                     csv_cell(total_length(s)), csv_cell(centroid.x()), csv_cell(centroid.y()),
                     csv_cell(displacement), csv_cell(drift)});
    }
    csv.write_file(run.path("diagnostics.csv"), run.hash);

    Json meta = metadata(run);
    meta["status"] = "ok";
    meta["filter"] = {{"level", cfg.fourier_filter_level}, {"used", r.filter_used}};
    meta["diagnostics"] = {{"steps", r.steps},
                           {"stored_states", traj.size()},
                           {"remeshes", r.remeshes},
                           {"circulation_initial", r.circulation.front()},
                           {"circulation_final", r.circulation.back()},
                           {"max_node_displacement", max_displacement},
                           {"max_marker_drift", max_marker_drift},
                           {"remesh_chord_deviation", r.remesh_chord_deviation},
                           {"min_self_distance", r.min_self_distance}};
    write_json_file(run.path("metadata.json"), meta);
    run.out << "simulate: " << r.steps << " steps to t = " << format_double(traj.back().t)
            << ", circulation drift " << format_double(std::abs(r.circulation.back() - r.circulation.front()))
            << ", filter level " << format_double(cfg.fourier_filter_level) << '\n';
    return exit_success;
}

// residual

int cmd_residual(const Run& run) {
    int suite_size = 12;
    const ResidualOptions options = parse_residual_options(run.config, &suite_size);
    const TrajectoryInput in = build_trajectory(run);
    const std::vector<TestFunction> suite = build_test_suite(in.trajectory, suite_size);
    const std::vector<ResidualReport> reports = residual_reports(in.trajectory, suite, options);

    CsvTable csv{{"test_function_id", "tip_covering", "residual_br", "residual_euler", "extrapolated_br",
                  "extrapolated_euler", "order_br", "order_euler", "floor", "converged_br", "converged_euler",
                  "verdict_br", "verdict_euler"},
                 {}};
    Json list = Json::array();
    int pass_br = 0;
    int pass_euler = 0;
    for (std::size_t f = 0; f < reports.size(); ++f) {
        const ResidualReport& r = reports[f];
        csv.add_row({r.test_function_id, csv_cell(r.tip_covering), csv_cell(r.residual_br), csv_cell(r.residual_euler),
                     csv_cell(r.br.extrapolated), csv_cell(r.euler.extrapolated), csv_cell(r.br.observed_order),
                     csv_cell(r.euler.observed_order), csv_cell(r.br.floor), csv_cell(r.br.converged),
                     csv_cell(r.euler.converged), br_label(r), euler_label(r)});
        list.push_back({{"test_function", test_function_json(suite[f])},
                        {"tip_covering", r.tip_covering},
                        {"residual_br", r.residual_br},
                        {"residual_euler", r.residual_euler},
                        {"br_refinements", refinements_json(r.br_refinements)},
                        {"euler_refinements", refinements_json(r.euler_refinements)},
                        {"br", verdict_json(r.br)},
                        {"euler", verdict_json(r.euler)},
                        {"summary", br_label(r) + " " + euler_label(r)}});
        pass_br += r.br.zero ? 1 : 0;
        pass_euler += r.euler.zero ? 1 : 0;
        run.out << r.test_function_id << ' ' << br_label(r) << ' ' << euler_label(r) << '\n';
    }
    csv.write_file(run.path("residual_report.csv"), run.hash);

    const Json summary{{"functions", reports.size()}, {"pass_br", pass_br}, {"pass_euler", pass_euler}};
    write_json_file(run.path("residual_report.json"),
                    Json{{"config_hash", run.hash},
                         {"trajectory", in.info},
                         {"levels", options.levels},
                         {"diagonal", std::string(to_string(options.diagonal))},
                         {"floor_factor", options.floor_factor},
                         {"not_numerically_certified", "H^-1_loc membership and the Lipschitz-in-time H^-4 estimate"},
                         {"reports", list},
                         {"summary", summary}});
    write_json_file(run.path("metadata.json"), metadata(run));
    run.out << "residual: " << pass_br << "/" << reports.size() << " PASS_BR, " << pass_euler << "/"
            << reports.size() << " PASS_EULER\n";
    return exit_success;
}

// regularity

struct L2Refinement {
    std::array<double, 3> l2{};
    bool divergent = false;
};

/// L2 norm of gamma on the state refined by 1, 2 and 4. Divergence: the
/// squared norm keeps growing by more than half of the previous increment.
L2Refinement l2_under_refinement(const SheetState& s) {
    L2Refinement r;
    r.l2[0] = lp_norm(s, 2.0);
    r.l2[1] = lp_norm(refine_state(s, 2), 2.0);
    r.l2[2] = lp_norm(refine_state(s, 4), 2.0);
    const double d1 = r.l2[1] * r.l2[1] - r.l2[0] * r.l2[0];
    const double d2 = r.l2[2] * r.l2[2] - r.l2[1] * r.l2[1];
    const double q = r.l2[2] * r.l2[2];
    r.divergent = !std::isfinite(q) || (d2 > 1e-6 * q && d2 > 0.5 * d1);
    return r;
}

int cmd_regularity(const Run& run, bool strict_flag) {
    Section s(run.config, "regularity");
    RegularityOptions opts;
    opts.lattice = static_cast<int>(checked_count(s.integer("lattice", opts.lattice), 1, "regularity.lattice"));
    opts.inflate = s.number("inflate", opts.inflate);
    opts.radii = s.numbers("radii", {});
    opts.refine = s.flag("refine", opts.refine);
    const Index max_states = checked_count(s.integer("max_states", 11), 1, "regularity.max_states");
    const bool strict = s.flag("strict", false) || strict_flag;
    s.finish();
    const TrajectoryInput in = build_trajectory(run);
    const SheetTrajectory& traj = in.trajectory;

    // Evenly spaced states including the first and the last.
    std::vector<std::size_t> picks;
    const std::size_t count = std::min<std::size_t>(traj.size(), static_cast<std::size_t>(max_states));
    for (std::size_t k = 0; k < count; ++k)
        picks.push_back(count == 1 ? 0 : (k * (traj.size() - 1)) / (count - 1));
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());

    CsvTable csv{{"state_index", "t", "a_estimate", "worst_center_x", "worst_center_y", "worst_radius",
                  "centers_sampled", "l1_gamma", "l2_gamma", "l2_gamma_refined_2", "l2_gamma_refined_4",
                  "l2_divergent"},
                 {}};
    Json states = Json::array();
    double max_a = 0.0;
    double max_l2 = 0.0;
    bool violated = false;
    for (std::size_t k : picks) {
        const SheetState& st = traj.states[k];
        const RegularityReport rep = estimate_regularity_constant(st, opts);
        const L2Refinement l2 = l2_under_refinement(st);
        max_a = std::max(max_a, rep.a_estimate);
        max_l2 = std::max(max_l2, rep.l2_gamma);
        violated = violated || l2.divergent;
        csv.add_row({csv_cell(static_cast<long long>(k)), csv_cell(st.t), csv_cell(rep.a_estimate),
                     csv_cell(rep.worst_center.x()), csv_cell(rep.worst_center.y()), csv_cell(rep.worst_radius),
                     csv_cell(static_cast<long long>(rep.centers_sampled)), csv_cell(rep.l1_gamma),
                     csv_cell(rep.l2_gamma), csv_cell(l2.l2[1]), csv_cell(l2.l2[2]), csv_cell(l2.divergent)});
        states.push_back({{"state_index", k},
                          {"t", st.t},
                          {"a_estimate", rep.a_estimate},
                          {"r_grid", rep.r_grid},
                          {"centers_sampled", rep.centers_sampled},
                          {"worst_case", {{"center", {rep.worst_center.x(), rep.worst_center.y()}},
                                          {"radius", rep.worst_radius}}},
                          {"l1_gamma", rep.l1_gamma},
                          {"l2_gamma", rep.l2_gamma},
                          {"l2_gamma_refined", {l2.l2[0], l2.l2[1], l2.l2[2]}},
                          {"l2_divergent", l2.divergent}});
    }
    csv.write_file(run.path("regularity.csv"), run.hash);
    const std::string flag = violated ? "HYPOTHESIS_VIOLATED" : "OK";
    write_json_file(run.path("regularity_report.json"),
                    Json{{"config_hash", run.hash},
                         {"trajectory", in.info},
                         {"states", states},
                         {"summary", {{"max_a_estimate", max_a}, {"max_l2_gamma", max_l2}, {"flag", flag}}},
                         {"note", "A is a sampled lower estimate; time independence is reported, not proven"}});
    write_json_file(run.path("metadata.json"), metadata(run));
    run.out << "regularity: max A " << format_double(max_a) << ", max L2 " << format_double(max_l2) << ", " << flag
            << '\n';
    return strict && violated ? exit_hypothesis_violation : exit_success;
}

// convergence

double observed_order(double coarse, double fine) {
    return coarse > 0.0 && fine > 0.0 ? std::log2(coarse / fine) : std::numeric_limits<double>::quiet_NaN();
}

int cmd_convergence(const Run& run, const std::string& study_flag) {
    Section s(run.config, "convergence");
    std::string study = s.text("study", "");
    if (!study_flag.empty()) study = study_flag;
    Json result{{"config_hash", run.hash}, {"study", study}};
    CsvTable csv;

    if (study == "pv-prandtl-munk") {
        const auto resolutions = s.integers("resolutions", {64, 128, 256, 512, 1024});
        s.finish();
        const QuadratureSpec q = parse_quadrature(run.config);
        csv.header = {"resolution", "error"};
        Json rows = Json::array();
        for (long long n : resolutions) {
            const SheetState st = as_input("study", [&] { return prandtl_munk_state(checked_count(n, 2, "n"), 0.0); });
            const VelocityField v = sheet_velocity(st, q);
            double e = 0.0;
            for (Index j = 1; j + 1 < st.size(); ++j) e = std::max(e, (v.u.col(j) - Point2(0.0, -0.5)).norm());
            csv.add_row({csv_cell(n), csv_cell(e)});
            rows.push_back({{"resolution", n}, {"error", e}});
        }
        result["rows"] = rows;
    } else if (study == "reparam-invariance") {
        const auto resolutions = s.integers("resolutions", {64, 128, 256});
        const double courant = s.number("courant", 0.8);
        const int pairings = static_cast<int>(checked_count(s.integer("pairings", 20), 1, "convergence.pairings"));
        s.finish();
        EvolutionConfig cfg = parse_evolution(run.config);
        csv.header = {"resolution", "dt", "hausdorff", "pairing_error"};
        Json rows = Json::array();
        std::vector<TestFunction> suite;
        double prev_h = 0.0;
        double prev_p = 0.0;
        for (long long n : resolutions) {
            const SheetState initial = build_initial(run.config, run.seed, checked_count(n, 4, "resolution"));
            if (suite.empty()) suite = pairing_suite(initial, pairings);
            cfg.dt = courant / static_cast<double>(n);
            cfg.scheme = EvolutionScheme::lagrangian;
            const SimulationResult lag = simulate(initial, cfg);
            cfg.scheme = EvolutionScheme::arclength;
            const SimulationResult arc = simulate(initial, cfg);
            const SheetState& a = lag.trajectory.back();
            const SheetState& b = arc.trajectory.back();
            const double h = hausdorff_distance(a, b);
            double p = 0.0;
            for (const TestFunction& phi : suite)
                p = std::max(p, std::abs(measure_pairing(a, phi) - measure_pairing(b, phi)));
            csv.add_row({csv_cell(n), csv_cell(cfg.dt), csv_cell(h), csv_cell(p)});
            Json row{{"resolution", n}, {"dt", cfg.dt}, {"hausdorff", h}, {"pairing_error", p}};
            if (!rows.empty()) {
                row["order_hausdorff"] = observed_order(prev_h, h);
                row["order_pairing"] = observed_order(prev_p, p);
            }
            rows.push_back(row);
            prev_h = h;
            prev_p = p;
        }
        result["rows"] = rows;
    } else if (study == "residual-refinement") {
        s.finish();
        int suite_size = 12;
        const ResidualOptions options = parse_residual_options(run.config, &suite_size);
        const TrajectoryInput in = build_trajectory(run);
        const std::vector<TestFunction> suite = build_test_suite(in.trajectory, suite_size);
        const std::vector<ResidualReport> reports = residual_reports(in.trajectory, suite, options);
        csv.header = {"test_function_id", "level", "resolution", "residual_br", "residual_euler"};
        Json rows = Json::array();
        for (const ResidualReport& r : reports) {
            for (std::size_t k = 0; k < r.br_refinements.size(); ++k) {
                const long long level = options.levels[k];
                csv.add_row({r.test_function_id, csv_cell(level),
                             csv_cell(static_cast<long long>(r.br_refinements[k].resolution)),
                             csv_cell(r.br_refinements[k].residual), csv_cell(r.euler_refinements[k].residual)});
                rows.push_back({{"test_function_id", r.test_function_id},
                                {"level", level},
                                {"resolution", r.br_refinements[k].resolution},
                                {"residual_br", r.br_refinements[k].residual},
                                {"residual_euler", r.euler_refinements[k].residual}});
            }
        }
        result["trajectory"] = in.info;
        result["rows"] = rows;
    } else {
        config_error("unknown convergence study '" + study +
                     "' (expected pv-prandtl-munk, reparam-invariance or residual-refinement)");
    }
    csv.write_file(run.path("convergence_" + study + ".csv"), run.hash);
    write_json_file(run.path("convergence_" + study + ".json"), result);
    write_json_file(run.path("metadata.json"), metadata(run));
    run.out << "convergence: " << study << ", " << csv.rows.size() << " rows\n";
    return exit_success;
}

// oracle-check

struct Check {
    std::string name;
    double value;
    double reference;
    double tolerance;
    bool pass;
};

int cmd_oracle_check(const Run& run) {
    Section s(run.config, "oracle_check");
    const Index pm_n = checked_count(s.integer("pm_n", 256), 2, "oracle_check.pm_n");
    const Index kh_n = checked_count(s.integer("kh_n", 64), 8, "oracle_check.kh_n");
    const Index gap_n = checked_count(s.integer("gap_n", 64), 2, "oracle_check.gap_n");
    const Index random_states = checked_count(s.integer("random_states", 10), 1, "oracle_check.random_states");
    s.finish();
    const QuadratureSpec q = parse_quadrature(run.config);
    std::vector<Check> checks;

    {
        const SheetState st = prandtl_munk_state(pm_n, 0.0);
        const VelocityField v = sheet_velocity(st, q);
        double e = 0.0;
        for (Index j = 1; j + 1 < st.size(); ++j) e = std::max(e, (v.u.col(j) - Point2(0.0, -0.5)).norm());
        checks.push_back({"prandtl_munk_velocity_error", e, 0.0, 1e-3, e <= 1e-3});
    }
    {
        const SheetState st = flat_uniform_state(kh_n, 1.0, 1.0);
        const double u = sheet_velocity(st, q).u.colwise().norm().maxCoeff();
        checks.push_back({"flat_uniform_velocity", u, 0.0, 1e-12, u <= 1e-12});
    }
    {
        OracleSpec spec;
        spec.kind = OracleKind::periodic_perturbed;
        spec.n = kh_n;
        spec.amplitude = 1e-6;
        spec.wavenumber = 1;
        const double base = kh_linearized_growth(spec, q).rate;
        for (int k : {2, 4}) {
            spec.wavenumber = k;
            const double ratio = kh_linearized_growth(spec, q).rate / (k * base);
            checks.push_back({"kh_growth_linear_in_k_" + std::to_string(k), ratio, 1.0, 0.05,
                              std::abs(ratio - 1.0) <= 0.05});
        }
    }
    {
        double worst = 0.0;
        for (Index i = 0; i < random_states; ++i) {
            const SheetState st = random_smooth_state(run.seed * 1000003ull + static_cast<std::uint64_t>(i), 64,
                                                      Topology::closed);
            const TestFunction phi("sym", BumpKind::gaussian_bump_truncated, st.xi.col(0), 0.9);
            const DiagonalCheck c = diagonal_equivalence_check(st, phi, 0.1);
            worst = std::max(worst, std::abs(c.single - c.double_sum) / std::max(std::abs(c.single), 1.0));
        }
        checks.push_back({"symmetrization_identity", worst, 0.0, 1e-12, worst <= 1e-12});
    }
    {
        const SheetTrajectory traj = prandtl_munk_trajectory(gap_n, 1.0, 0.05);
        const std::vector<TestFunction> suite = build_test_suite(traj, 12);
        const std::vector<ResidualReport> reps = residual_reports(traj, {suite.front()});
        const double gap = prandtl_munk_euler_gap(suite.front(), 1.0);
        const double value = reps.front().euler.extrapolated - reps.front().br.extrapolated;
        const double rel = std::abs(value - gap) / std::abs(gap);
        checks.push_back({"prandtl_munk_euler_gap", value, gap, 0.05, rel <= 0.05});
    }

    CsvTable csv{{"check", "value", "reference", "tolerance", "pass"}, {}};
    Json list = Json::array();
    bool all = true;
    for (const Check& c : checks) {
        csv.add_row({c.name, csv_cell(c.value), csv_cell(c.reference), csv_cell(c.tolerance), csv_cell(c.pass)});
        list.push_back({{"check", c.name}, {"value", c.value}, {"reference", c.reference},
                        {"tolerance", c.tolerance}, {"pass", c.pass}});
        all = all && c.pass;
        run.out << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << format_double(c.value) << '\n';
    }
    csv.write_file(run.path("oracle_check.csv"), run.hash);
    write_json_file(run.path("oracle_check.json"), Json{{"config_hash", run.hash}, {"checks", list}, {"pass", all}});
    write_json_file(run.path("metadata.json"), metadata(run));
    return all ? exit_success : exit_numerical_abort;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::format:
        case ErrorKind::support:
        case ErrorKind::unsupported: return exit_config_error;
        default: return exit_numerical_abort;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Planar vortex sheet laboratory", args.empty() ? "vsheet" : args.front()};
    app.require_subcommand(1);

    struct Options {
        std::string config;
        std::string out = ".";
        int threads = 0;
        long long seed = 0;
        std::string trajectory;
        std::string study;
        bool strict = false;
    } opt;
    std::map<CLI::App*, std::string> names;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "Evolve a sheet and write its trajectory"},
        {"residual", "Weak Birkhoff-Rott and weak Euler residuals on a test suite"},
        {"regularity", "Regular-curve constant and density norms per state"},
        {"convergence", "Named convergence study as (resolution, error) CSV"},
        {"oracle-check", "Compare solvers against reference solutions"}};
    CLI::Option* seed_option = nullptr;
    std::vector<CLI::Option*> seed_options;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        names[sub] = name;
        sub->add_option("--config", opt.config, "JSON run configuration")->required();
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--threads", opt.threads, "Worker threads (0 keeps the default)");
        seed_options.push_back(sub->add_option("--seed", opt.seed, "Random seed (overrides the config)"));
        if (name == "residual" || name == "regularity")
            sub->add_option("--trajectory", opt.trajectory, "Trajectory JSON-lines file (overrides the config)");
        if (name == "regularity") sub->add_flag("--strict", opt.strict, "Exit 4 on a hypothesis violation");
        if (name == "convergence") sub->add_option("--study", opt.study, "Study name (overrides the config)");
    }

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("vsheet");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_success : exit_config_error;
    }
    for (CLI::Option* o : seed_options) {
        if (o->count() > 0) seed_option = o;
    }
    std::string command;
    for (CLI::App* sub : app.get_subcommands()) command = names[sub];

    fs::path out_dir(opt.out);
    std::string hash;
    try {
        Json config = read_json_file(opt.config);
        if (!config.is_object()) config_error("config must be a JSON object");
        for (const auto& item : config.items()) {
            if (!kTopLevelKeys.count(item.key())) config_error("unknown top-level option '" + item.key() + "'");
        }
        if (seed_option) config["seed"] = opt.seed;
        if (!config.contains("seed")) config["seed"] = 0;
        const Json& seed = config["seed"];
        if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0))
            config_error("'seed' must be a non-negative integer");
        config["seed"] = seed.get<std::uint64_t>();
        if (!opt.trajectory.empty()) config["trajectory"] = Json{{"kind", "file"}, {"path", opt.trajectory}};
        if (!opt.study.empty()) config["convergence"]["study"] = opt.study;
        if (opt.threads < 0) config_error("--threads must be non-negative");
        hash = config_hash(config);

        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) config_error("cannot create output directory '" + opt.out + "': " + ec.message());
        detail::set_thread_count(opt.threads);

        const Run run{command, config, hash, out_dir, config["seed"].get<std::uint64_t>(), opt.threads, out, err};
        if (command == "simulate") return cmd_simulate(run);
        if (command == "residual") return cmd_residual(run);
        if (command == "regularity") return cmd_regularity(run, opt.strict);
        if (command == "convergence") return cmd_convergence(run, opt.study);
        return cmd_oracle_check(run);
    } catch (const SheetError& e) {
        const int code = exit_code_for(e.kind());
        err << "error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
        std::error_code ec;
        if (fs::is_directory(out_dir, ec)) {
            try {
                write_json_file((out_dir / "error.json").string(),
                                Json{{"command", command},
                                     {"config_hash", hash},
                                     {"category", std::string(to_string(e.kind()))},
                                     {"message", e.what()},
                                     {"exit_code", code}});
            } catch (const SheetError&) {
            }
        }
        return code;
    } catch (const Json::exception& e) {
        err << "error[config]: " << e.what() << '\n';
        return exit_config_error;
    }
}

}  // namespace vsheet
