#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"
#include "ciagrid/json_io.hpp"
#include "ciagrid/prefix_heuristic.hpp"
#include "ciagrid/refinement.hpp"
#include "ciagrid/scarp_model.hpp"
#include "ciagrid/scarp_solve.hpp"
#include "ciagrid/sur.hpp"
#include "ciagrid/synthetic.hpp"

#ifndef CIAGRID_DATA_DIR
#define CIAGRID_DATA_DIR "data"
#endif

using namespace ciagrid;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitDepth = 3;
constexpr int kExitBudget = 4;

struct BudgetWithoutIncumbent : Error {
    using Error::Error;
};

struct Options {
    std::string instance;
    std::string grid;
    std::string delta;
    int depth0 = 0;
    std::size_t window = 8;
    std::size_t beam = 0;
    std::uint64_t node_budget = 10'000'000;
    double time_budget = 60.0;
    std::string cuts = "none";
    std::string fix_binary = "on";
    bool heuristic = true;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string method = "sur";
    std::string omega;
    // generate
    std::string family = "linear_front";
    int dim = 2;
    int modes = 2;
    int ref_depth = 5;
    int quantum = 16;
    // experiment
    std::size_t count = 8;
    std::string data_dir = CIAGRID_DATA_DIR;
    std::string delta_factor = "1/64";
};

/// Collects artifacts and writes the manifest last.
class Run {
public:
    Run(std::string command, const Options& o, json config) : command_(std::move(command)), out_(o.out) {
        config["command"] = command_;
        config_ = std::move(config);
        hash_ = fnv1a_hex(config_.dump());
        fs::create_directories(out_);
    }

    const std::string& hash() const { return hash_; }

    void input(const std::string& path) {
        if (!path.empty()) {
            inputs_[path] = fnv1a_hex(read_text_file(path));
        }
    }

    void write(const std::string& name, const std::string& contents) {
        write_text_file((fs::path(out_) / name).string(), contents);
        artifacts_.push_back(name);
    }

    void write_json(const std::string& name, json j) {
        j["config_hash"] = hash_;
        write(name, j.dump(2) + "\n");
    }

    void finish(const std::string& status) {
        json m;
        m["command"] = command_;
        m["config"] = config_;
        m["config_hash"] = hash_;
        m["inputs"] = json::object();
        for (const auto& [p, h] : inputs_) {
            m["inputs"][p] = h;
        }
        m["artifacts"] = artifacts_;
        m["status"] = status;
        write_text_file((fs::path(out_) / "manifest.json").string(), m.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string out_;
    json config_;
    std::string hash_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> artifacts_;
};

json base_config(const Options& o) {
    return json{{"instance", o.instance}, {"grid", o.grid},         {"delta", o.delta},
                {"depth0", o.depth0},     {"window", o.window},     {"beam", o.beam},
                {"node_budget", o.node_budget}, {"time_budget", o.time_budget}, {"cuts", o.cuts},
                {"fix_binary", o.fix_binary}, {"heuristic", o.heuristic}, {"seed", o.seed},
                {"method", o.method},     {"omega", o.omega}};
}

Rational parse_delta(const std::string& s) {
    if (s.empty()) {
        throw Error("--delta is required");
    }
    const Rational d = parse_rational(s);
    if (d <= 0) {
        throw Error("--delta must be positive");
    }
    return d;
}

ControlField load_alpha(const Options& o) {
    if (o.instance.empty()) {
        throw Error("--instance is required");
    }
    return control_from_json(read_json_file(o.instance));
}

std::string history_csv(const RefinementResult& r) {
    std::ostringstream s;
    s << "iteration,split_cell,delta,distance,cells\n";
    for (const auto& h : r.history) {
        s << h.iteration << ',' << h.split_cell + 1 << ',' << to_decimal_string(h.delta_cell) << ','
          << to_decimal_string(h.distance) << ',' << h.cells << '\n';
    }
    return s.str();
}

// Plain PGM of the mode map at the finest grid depth; black is mode 1.
std::string mode_map_pgm(const Grid& grid, const BinaryControl& omega, int modes) {
    const int depth = grid.max_depth();
    const std::size_t side = std::size_t{1} << depth;
    std::vector<int> pixels(side * side, 0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Cell& c = grid.cell(n);
        const std::size_t scale = std::size_t{1} << (depth - c.depth);
        for (std::size_t dy = 0; dy < scale; ++dy) {
            for (std::size_t dx = 0; dx < scale; ++dx) {
                const std::size_t x = c.index[0] * scale + dx;
                const std::size_t y = c.index[1] * scale + dy;
                pixels[(side - 1 - y) * side + x] = modes > 1 ? omega.modes[n] * 255 / (modes - 1) : 0;
            }
        }
    }
    std::ostringstream s;
    s << "P2\n" << side << ' ' << side << "\n255\n";
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            s << pixels[y * side + x] << (x + 1 == side ? '\n' : ' ');
        }
    }
    return s.str();
}

void write_solution(Run& run, const Grid& grid, const BinaryControl& omega, int modes) {
    run.write_json("omega.json", binary_control_to_json(omega));
    if (grid.dim() == 2) {
        run.write("modes.pgm", mode_map_pgm(grid, omega, modes));
    }
}

/// Grid from --grid, or the adaptive refinement of the --depth0 uniform grid.
Grid scarp_grid(const Options& o, const ControlField& alpha, const Rational& delta, Run& run) {
    if (!o.grid.empty()) {
        run.input(o.grid);
        return grid_from_json(read_json_file(o.grid));
    }
    const RefinementResult r = refine_until(alpha, delta, initial_grid(alpha.domain(), o.depth0));
    run.write_json("grid.json", grid_to_json(r.grid));
    run.write("history.csv", history_csv(r));
    return r.grid;
}

CutSelection cut_selection(const std::string& s) {
    if (s == "none") {
        return {false, false};
    }
    if (s == "lattice") {
        return {true, false};
    }
    if (s == "parity") {
        return {false, true};
    }
    if (s == "all") {
        return {true, true};
    }
    throw Error("--cuts must be none, lattice, parity or all");
}

bool fix_binary_flag(const std::string& s) {
    if (s != "on" && s != "off") {
        throw Error("--fix-binary must be on or off");
    }
    return s == "on";
}

std::vector<Cut> separate(const Options& o, const ScarpInstance& inst, const ControlField& alpha, const Grid& grid) {
    const CutSelection which = cut_selection(o.cuts);
    if (!which.lattice && !which.parity) {
        return {};
    }
    return separate_all(inst, relaxed_point(alpha, grid), which);
}

int cmd_generate(const Options& o) {
    FieldSpec spec;
    spec.family = family_from_string(o.family);
    spec.dim = o.dim;
    spec.modes = o.modes;
    spec.ref_depth = o.ref_depth;
    spec.quantum = o.quantum;
    spec.seed = o.seed;
    json config{{"family", o.family}, {"dim", o.dim},       {"modes", o.modes},
                {"ref_depth", o.ref_depth}, {"quantum", o.quantum}, {"seed", o.seed}};
    Run run("generate", o, config);
    const ControlField alpha =
        spec.family == Family::helmholtz_slice ? load_helmholtz_slice(o.data_dir) : generate_field(spec);
    run.write_json("instance.json", control_to_json(alpha));
    run.finish("ok");
    return kExitOk;
}

int cmd_refine(const Options& o) {
    Run run("refine", o, base_config(o));
    run.input(o.instance);
    const ControlField alpha = load_alpha(o);
    const Rational delta = parse_delta(o.delta);
    const RefinementResult r = refine_until(alpha, delta, initial_grid(alpha.domain(), o.depth0));
    run.write_json("grid.json", grid_to_json(r.grid));
    run.write("history.csv", history_csv(r));
    write_solution(run, r.grid, r.omega, alpha.modes());
    run.write_json("report.json", json{{"cells", r.grid.size()},
                                       {"iterations", r.iterations},
                                       {"distance", to_double(r.distance)},
                                       {"distance_exact", to_string(r.distance)}});
    run.finish("ok");
    std::cout << "cells " << r.grid.size() << " iterations " << r.iterations << " d " << to_decimal_string(r.distance)
              << '\n';
    return kExitOk;
}

int cmd_round(const Options& o) {
    if (o.method != "sur") {
        throw Error("--method must be sur");
    }
    Run run("round", o, base_config(o));
    run.input(o.instance);
    const ControlField alpha = load_alpha(o);
    Grid grid = initial_grid(alpha.domain(), o.depth0);
    if (!o.grid.empty()) {
        run.input(o.grid);
        grid = grid_from_json(read_json_file(o.grid));
    }
    const BinaryControl omega = sur_variant(alpha, grid);
    const Rational d = pseudometric(alpha, omega, grid);
    write_solution(run, grid, omega, alpha.modes());
    run.write_json("report.json", json{{"cells", grid.size()}, {"distance", to_double(d)}, {"distance_exact", to_string(d)}});
    run.finish("ok");
    std::cout << "cells " << grid.size() << " d " << to_decimal_string(d) << '\n';
    return kExitOk;
}

int cmd_model(const Options& o) {
    Run run("model", o, base_config(o));
    run.input(o.instance);
    const ControlField alpha = load_alpha(o);
    const Rational delta = parse_delta(o.delta);
    const Grid grid = scarp_grid(o, alpha, delta, run);
    const ScarpInstance inst = build_instance(alpha, grid, delta, {}, fix_binary_flag(o.fix_binary));
    const auto cuts = separate(o, inst, alpha, grid);
    run.write("model.lp", "\\ config_hash " + run.hash() + "\n" + export_lp(inst, cuts));
    run.write_json("instance.json", instance_to_json(inst));
    run.finish("ok");
    std::cout << "cells " << inst.cells << " cuts " << cuts.size() << '\n';
    return kExitOk;
}

int emit_report(Run& run, const Grid& grid, const ScarpInstance& inst, const SolveReport& r, std::size_t cuts) {
    json j = report_to_json(r);
    j["cells"] = inst.cells;
    j["cuts"] = cuts;
    run.write_json("report.json", j);
    if (!r.has_incumbent) {
        run.finish("budget exhausted without incumbent");
        throw BudgetWithoutIncumbent("budget exhausted without an incumbent");
    }
    write_solution(run, grid, r.best, inst.modes);
    run.finish("ok");
    const double g = r.gap();
    std::cout << "cells " << inst.cells << " primal " << to_decimal_string(r.objective) << " dual "
              << to_decimal_string(r.dual_bound) << " gap " << (std::isfinite(g) ? std::to_string(g) : "inf")
              << " nodes " << r.nodes << (r.proven_optimal ? " optimal" : "") << '\n';
    return kExitOk;
}

int cmd_solve(const Options& o) {
    Run run("solve", o, base_config(o));
    run.input(o.instance);
    const ControlField alpha = load_alpha(o);
    const Rational delta = parse_delta(o.delta);
    const Grid grid = scarp_grid(o, alpha, delta, run);
    const ScarpInstance inst = build_instance(alpha, grid, delta, {}, fix_binary_flag(o.fix_binary));
    SolveConfig config;
    config.node_budget = o.node_budget;
    config.time_budget_seconds = o.time_budget;
    config.use_heuristic = o.heuristic;
    config.heuristic_window = o.window;
    config.heuristic_beam = o.beam;
    config.cuts = separate(o, inst, alpha, grid);
    std::optional<BinaryControl> start;
    if (!o.omega.empty()) {
        run.input(o.omega);
        start = binary_control_from_json(read_json_file(o.omega));
    }
    const SolveReport r = solve_exact(inst, start, config);
    return emit_report(run, grid, inst, r, config.cuts.size());
}

int cmd_heuristic(const Options& o) {
    Run run("heuristic", o, base_config(o));
    run.input(o.instance);
    const ControlField alpha = load_alpha(o);
    const Rational delta = parse_delta(o.delta);
    const Grid grid = scarp_grid(o, alpha, delta, run);
    const ScarpInstance inst = build_instance(alpha, grid, delta, {}, fix_binary_flag(o.fix_binary));
    HeuristicConfig hc;
    hc.window = o.window;
    hc.beam = o.beam;
    SolveReport r;
    try {
        r = prefix_heuristic(inst, hc);
    } catch (const InfeasibleError&) {
        // fall back to the rounding output when it satisfies the windows
        const BinaryControl sur = sur_variant(alpha, grid);
        if (!is_feasible(inst, sur)) {
            throw;
        }
        r.best = sur;
        r.has_incumbent = true;
        r.objective = objective_value(inst, sur);
        r.incumbent_source = IncumbentSource::supplied;
    }
    return emit_report(run, grid, inst, r, 0);
}

struct Variant {
    std::string name;
    bool adaptive;
    bool heuristic;
    bool cuts;
};

int cmd_experiment(const Options& o) {
    json config = base_config(o);
    config["count"] = o.count;
    config["delta_factor"] = o.delta_factor;
    config["data_dir"] = o.data_dir;
    Run run("experiment", o, config);

    std::vector<NamedField> suite = smooth_suite(o.seed, o.count);
    for (auto family : {Family::constant_blend, Family::checkerboard}) {
        FieldSpec spec;
        spec.family = family;
        spec.ref_depth = 5;
        spec.seed = o.seed;
        suite.push_back({to_string(family) + "_2d_s" + std::to_string(o.seed), generate_field(spec)});
    }
    const std::string slice = (fs::path(o.data_dir) / "helmholtz16.json").string();
    if (fs::exists(slice)) {
        run.input(slice);
        suite.push_back({"helmholtz16", load_helmholtz_slice(o.data_dir)});
    }

    const Rational factor = parse_rational(o.delta_factor);
    const std::vector<Variant> variants{{"uniform", false, false, false},
                                        {"adaptive", true, false, false},
                                        {"adaptive+heuristic", true, true, false},
                                        {"adaptive+heuristic+cuts", true, true, true}};
    std::ostringstream csv;
    csv << "instance,variant,N,primal,dual,gap,nodes,status\n";
    for (const auto& [name, alpha] : suite) {
        const Rational delta = factor * alpha.domain().volume();
        const int uniform_depth = coarsest_uniform_depth(alpha, delta);
        std::optional<Grid> adaptive;
        try {
            adaptive = refine_until(alpha, delta, initial_grid(alpha.domain(), 0)).grid;
        } catch (const DepthExhausted&) {
        }
        for (const auto& v : variants) {
            csv << name << ',' << v.name << ',';
            std::optional<Grid> grid = adaptive;
            if (!v.adaptive) {
                grid.reset();
                if (uniform_depth >= 0) {
                    grid = initial_grid(alpha.domain(), uniform_depth);
                }
            }
            if (!grid) {
                csv << ",,,,,no grid meets the tolerance\n";
                continue;
            }
            csv << grid->size() << ',';
            try {
                const ScarpInstance inst = build_instance(alpha, *grid, delta, {}, fix_binary_flag(o.fix_binary));
                SolveConfig sc;
                sc.node_budget = o.node_budget;
                sc.time_budget_seconds = o.time_budget;
                sc.use_heuristic = v.heuristic;
                sc.heuristic_window = o.window;
                sc.heuristic_beam = o.beam == 0 ? 2000 : o.beam;
                if (v.cuts) {
                    sc.cuts = separate_all(inst, relaxed_point(alpha, *grid));
                }
                const SolveReport r = solve_exact(inst, std::nullopt, sc);
                const double g = r.gap();
                csv << (r.has_incumbent ? to_decimal_string(r.objective) : "") << ','
                    << to_decimal_string(r.dual_bound) << ',' << (std::isfinite(g) ? std::to_string(g) : "inf") << ','
                    << r.nodes << ',' << (r.proven_optimal ? "optimal" : "budget") << '\n';
            } catch (const InfeasibleError& e) {
                csv << ",,,,infeasible\n";
            }
        }
    }
    run.write("experiment.csv", csv.str());
    run.finish("ok");
    std::cout << csv.str();
    return kExitOk;
}

void add_scarp_flags(CLI::App* sub, Options& o) {
    sub->add_option("--instance", o.instance, "relaxed control JSON")->required();
    sub->add_option("--delta", o.delta, "tolerance (decimal or p/q)")->required();
    sub->add_option("--grid", o.grid, "rounding grid JSON (default: adaptive refinement)");
    sub->add_option("--depth0", o.depth0, "initial uniform depth for the refinement");
    sub->add_option("--cuts", o.cuts, "none, lattice, parity or all");
    sub->add_option("--fix-binary", o.fix_binary, "on or off");
    sub->add_option("--seed", o.seed, "seed (recorded)");
    sub->add_option("--out", o.out, "output directory");
}

void add_search_flags(CLI::App* sub, Options& o) {
    sub->add_option("--window", o.window, "heuristic window");
    sub->add_option("--beam", o.beam, "heuristic beam (0: unbounded)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Combinatorial integral approximation on dyadic rounding grids"};
    app.require_subcommand(1);
    Options o;
    std::string mode;

    auto* gen = app.add_subcommand("generate", "write a synthetic relaxed control");
    gen->add_option("--family", o.family,
                    "constant_blend, linear_front, radial_bump, checkerboard or helmholtz_slice");
    gen->add_option("--dim", o.dim);
    gen->add_option("--modes", o.modes);
    gen->add_option("--ref-depth", o.ref_depth);
    gen->add_option("--quantum", o.quantum);
    gen->add_option("--seed", o.seed);
    gen->add_option("--data-dir", o.data_dir);
    gen->add_option("--out", o.out);

    auto* refine = app.add_subcommand("refine", "adaptive grid refinement");
    refine->add_option("--instance", o.instance)->required();
    refine->add_option("--delta", o.delta)->required();
    refine->add_option("--depth0", o.depth0);
    refine->add_option("--seed", o.seed);
    refine->add_option("--out", o.out);

    auto* round = app.add_subcommand("round", "round on a fixed grid");
    round->add_option("--method", o.method, "sur");
    round->add_option("--instance", o.instance)->required();
    round->add_option("--grid", o.grid);
    round->add_option("--depth0", o.depth0);
    round->add_option("--seed", o.seed);
    round->add_option("--out", o.out);

    auto* scarp = app.add_subcommand("scarp", "switching-cost-aware rounding");
    scarp->require_subcommand(1);
    std::vector<CLI::App*> models{scarp->add_subcommand("model", "export the integer program"),
                                  app.add_subcommand("model", "alias of scarp model")};
    std::vector<CLI::App*> solves{scarp->add_subcommand("solve", "branch-and-bound"),
                                  app.add_subcommand("solve", "alias of scarp solve")};
    std::vector<CLI::App*> heuristics{scarp->add_subcommand("heuristic", "prefix heuristic"),
                                      app.add_subcommand("heuristic", "alias of scarp heuristic")};
    for (auto* s : models) {
        add_scarp_flags(s, o);
        s->callback([&] { mode = "model"; });
    }
    for (auto* s : solves) {
        add_scarp_flags(s, o);
        add_search_flags(s, o);
        s->add_option("--node-budget", o.node_budget);
        s->add_option("--time-budget", o.time_budget, "seconds");
        s->add_option("--omega", o.omega, "warm start assignment JSON");
        s->add_flag("!--no-heuristic", o.heuristic, "skip the heuristic warm start");
        s->callback([&] { mode = "solve"; });
    }
    for (auto* s : heuristics) {
        add_scarp_flags(s, o);
        add_search_flags(s, o);
        s->callback([&] { mode = "heuristic"; });
    }

    auto* exp = app.add_subcommand("experiment", "uniform vs adaptive comparison on the synthetic suite");
    exp->add_option("--seed", o.seed);
    exp->add_option("--count", o.count, "smooth instances");
    exp->add_option("--delta-factor", o.delta_factor, "tolerance as a fraction of the domain volume");
    exp->add_option("--node-budget", o.node_budget);
    exp->add_option("--time-budget", o.time_budget, "seconds per solve");
    exp->add_option("--window", o.window);
    exp->add_option("--beam", o.beam);
    exp->add_option("--fix-binary", o.fix_binary);
    exp->add_option("--data-dir", o.data_dir);
    exp->add_option("--out", o.out);
    exp->callback([&] {
        mode = "experiment";
        if (exp->count("--node-budget") == 0) {
            o.node_budget = 200'000;
        }
        if (exp->count("--time-budget") == 0) {
            o.time_budget = 10.0;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*gen) {
            return cmd_generate(o);
        }
        if (*refine) {
            return cmd_refine(o);
        }
        if (*round) {
            return cmd_round(o);
        }
        if (mode == "model") {
            return cmd_model(o);
        }
        if (mode == "solve") {
            return cmd_solve(o);
        }
        if (mode == "heuristic") {
            return cmd_heuristic(o);
        }
        if (mode == "experiment") {
            return cmd_experiment(o);
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const DepthExhausted& e) {
        std::cerr << "depth exhausted: " << e.what() << '\n';
        return kExitDepth;
    } catch (const BudgetWithoutIncumbent& e) {
        std::cerr << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
