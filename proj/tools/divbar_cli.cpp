// Command-line front end for the dividend-barrier solver: five subcommands
// (policy, value, ruin, bstar, capital) plus figure presets. Output is CSV
// with '#' metadata comments, or an aligned human-readable report; identical
// invocations produce identical bytes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divbar/divbar.hpp"

namespace {

using namespace divbar;

struct Options {
    double mu = 0.0;
    double lambda = 0.0;
    double sigma2 = 0.0;
    double sigma = 0.0;
    double c = 0.0;
    double T = 0.0;
    double epsilon = 0.5;
    double b = 0.0;  // 0 = use b0
    std::string x_grid;
    double dt = 0.0;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    int ny = 400;
    int nt = 0;
    std::string method = "pde";
    std::string out;
    std::string format;  // empty = per-command default (policy: human, else csv)
    int threads = 1;
    std::string sweep;
    std::string eps_grid;
    std::string b_grid;
    std::vector<std::string> notes;  // extra metadata comments (preset provenance)
};

ModelParams build_params(const Options& o) {
    double sig = o.sigma;
    if (o.sigma2 > 0.0) sig = std::sqrt(o.sigma2);
    if (sig <= 0.0) throw ConfigError("one of --sigma2 or --sigma is required");
    ModelParams p{o.mu, o.lambda, sig, o.c, o.T > 0.0 ? o.T : 1.0, o.epsilon};
    return validate(p);
}

std::vector<double> parse_grid(const std::string& text) {
    double start = 0.0, stop = 0.0, step = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &tail) != 3) {
        throw ConfigError("grid must be start:stop:step, got '" + text + "'");
    }
    if (!(step > 0.0) || stop < start) {
        throw ConfigError("grid needs step > 0 and stop >= start: '" + text + "'");
    }
    const double count = (stop - start) / step;
    if (count > 1e6) throw ConfigError("grid too fine: '" + text + "'");
    std::vector<double> v;
    for (int i = 0;; ++i) {
        const double x = start + step * i;
        if (x > stop + 1e-9 * step) break;
        v.push_back(std::min(x, stop));
    }
    return v;
}

/// One output table: metadata lines, column names, numeric rows.
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string render(const Table& t, const std::string& format) {
    std::ostringstream os;
    if (format == "human") {
        for (const std::string& cm : t.comments) os << cm << "\n";
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%s%16s", j ? " " : "", t.columns[j].c_str());
            os << buf;
        }
        os << "\n";
        for (const std::vector<double>& row : t.rows) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%s%16.8g", j ? " " : "", row[j]);
                os << buf;
            }
            os << "\n";
        }
        return os.str();
    }
    if (format != "csv") throw ConfigError("--format must be csv or human");
    CsvWriter w(os);
    for (const std::string& cm : t.comments) w.comment(cm);
    w.header(t.columns);
    std::vector<std::string> cells;
    for (const std::vector<double>& row : t.rows) {
        cells.clear();
        for (double v : row) cells.push_back(fmt17(v));
        w.row(cells);
    }
    return os.str();
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    f << text;
}

std::string param_echo(const ModelParams& p) {
    return "mu=" + fmt17(p.mu) + " lambda=" + fmt17(p.lambda) + " sigma2=" +
           fmt17(p.sigma2()) + " c=" + fmt17(p.c) + " T=" + fmt17(p.T) +
           " epsilon=" + fmt17(p.epsilon);
}

PdeGrid pde_grid(const Options& o) {
    PdeGrid g;
    g.ny = o.ny;
    g.nt = o.nt;
    return g;
}

SimConfig sim_config(const Options& o) {
    SimConfig s;
    s.dt = o.dt;
    s.n_paths = o.paths;
    s.seed = o.seed;
    s.threads = o.threads;
    return s;
}

std::vector<double> default_x_grid(const Options& o, double b, int segments) {
    if (!o.x_grid.empty()) return parse_grid(o.x_grid);
    std::vector<double> v;
    for (int i = 0; i <= segments; ++i) v.push_back(b * i / segments);
    return v;
}

// ---------------------------------------------------------------- policy --

int cmd_policy(const Options& o) {
    if (o.T <= 0.0) throw ConfigError("policy requires --T");
    const ModelParams p = build_params(o);
    const PolicyDecision dec = decide_policy(p, pde_grid(o));

    Table t;
    t.comments.push_back("command: policy");
    t.comments.push_back(param_echo(p));
    for (const std::string& n : o.notes) t.comments.push_back(n);
    t.comments.push_back("regime: " + std::string(to_string(dec.solution.regime)));
    t.comments.push_back("b0: " + fmt17(dec.solution.b0));
    t.comments.push_back(std::string("constrained: ") + (dec.constrained ? "yes" : "no"));
    t.comments.push_back("barrier: " + fmt17(dec.chosen_barrier));
    t.comments.push_back("attained_ruin_prob: " + fmt17(dec.attained_ruin_prob));
    t.columns = {"x", "value", "control"};
    for (double x : default_x_grid(o, dec.chosen_barrier, 20)) {
        t.rows.push_back({x, dec.value_at(x), dec.control_at(x)});
    }
    write_out(o.out, render(t, o.format.empty() ? "human" : o.format));
    return 0;
}

// ----------------------------------------------------------------- value --

struct SweepSet {
    std::string label;
    ModelParams params;
};

std::vector<SweepSet> sweep_sets(const Options& o) {
    std::vector<SweepSet> sets;
    if (o.sweep.empty()) {
        sets.push_back({"value", build_params(o)});
        return sets;
    }
    const std::size_t eq = o.sweep.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep must be key=v1,v2,...");
    const std::string key = o.sweep.substr(0, eq);
    std::stringstream vals(o.sweep.substr(eq + 1));
    std::string item;
    while (std::getline(vals, item, ',')) {
        Options oi = o;
        const double v = std::stod(item);
        if (key == "mu") {
            oi.mu = v;
        } else if (key == "lambda") {
            oi.lambda = v;
        } else if (key == "sigma2") {
            oi.sigma2 = v;
            oi.sigma = 0.0;
        } else if (key == "c") {
            oi.c = v;
        } else {
            throw ConfigError("--sweep key must be one of mu, lambda, sigma2, c");
        }
        sets.push_back({"value_" + key + "_" + item, build_params(oi)});
    }
    if (sets.empty()) throw ConfigError("--sweep lists no values");
    return sets;
}

int cmd_value(const Options& o) {
    const std::vector<SweepSet> sets = sweep_sets(o);
    const bool want_mc = o.method == "mc" || o.method == "both";
    const bool want_pde = o.method != "mc";
    if (!want_mc && o.method != "pde") throw ConfigError("--method must be pde, mc or both");

    std::vector<HjbSolution> sols;
    for (const SweepSet& s : sets) {
        sols.push_back(solve_hjb(s.params, o.b > 0.0 ? o.b : compute_b0(s.params)));
    }
    Table t;
    t.comments.push_back("command: value");
    for (const std::string& n : o.notes) t.comments.push_back(n);
    for (std::size_t k = 0; k < sets.size(); ++k) {
        t.comments.push_back(sets[k].label + ": " + param_echo(sets[k].params) +
                             " b=" + fmt17(sols[k].b) + " regime=" +
                             to_string(sols[k].regime));
    }
    if (want_mc) {
        t.comments.push_back("mc: paths=" + std::to_string(o.paths) +
                             " seed=" + std::to_string(o.seed) + " dt=" + fmt17(o.dt));
    }
    t.columns = {"x"};
    for (const SweepSet& s : sets) {
        if (want_pde) t.columns.push_back(s.label);
        if (want_mc) {
            t.columns.push_back(s.label + "_mc");
            t.columns.push_back(s.label + "_mc_stderr");
        }
    }
    const std::vector<double> xs = default_x_grid(o, sols.front().b, 100);
    for (double x : xs) {
        std::vector<double> row{x};
        for (std::size_t k = 0; k < sets.size(); ++k) {
            if (want_pde) row.push_back(value_g(sols[k], x));
            if (want_mc) {
                const double xc = std::min(x, sols[k].b);
                PathBatch pb = estimate_value(sets[k].params, ControlFunction(sols[k]),
                                              sols[k].b, xc, sim_config(o));
                // above the barrier the overflow is paid out immediately
                row.push_back(pb.value + (x - xc));
                row.push_back(pb.value_stderr);
            }
        }
        t.rows.push_back(std::move(row));
    }
    write_out(o.out, render(t, o.format.empty() ? "csv" : o.format));
    return 0;
}

// ------------------------------------------------------------------ ruin --

int cmd_ruin(const Options& o) {
    if (o.T <= 0.0) throw ConfigError("ruin requires --T");
    const ModelParams p = build_params(o);
    const bool want_mc = o.method == "mc" || o.method == "both";
    const bool want_pde = o.method != "mc";
    if (!want_mc && o.method != "pde") throw ConfigError("--method must be pde, mc or both");

    const double b = o.b > 0.0 ? o.b : compute_b0(p);
    const HjbSolution sol = solve_hjb(p, b);
    const ControlFunction A(sol);

    Table t;
    t.comments.push_back("command: ruin");
    t.comments.push_back(param_echo(p));
    for (const std::string& n : o.notes) t.comments.push_back(n);
    t.comments.push_back("b=" + fmt17(b) + " regime=" + to_string(sol.regime));

    SurvivalField field;
    if (want_pde) {
        field = solve_survival_pde(p, A, b, p.T, pde_grid(o));
        t.comments.push_back("pde: ny=" + std::to_string(field.ny) +
                             " nt=" + std::to_string(field.nt));
    }
    if (want_mc) {
        t.comments.push_back("mc: paths=" + std::to_string(o.paths) +
                             " seed=" + std::to_string(o.seed) + " dt=" + fmt17(o.dt));
    }
    t.columns = {"x"};
    if (want_pde) t.columns.push_back("psi_pde");
    if (want_mc) {
        t.columns.push_back("psi_mc");
        t.columns.push_back("psi_mc_stderr");
    }
    if (want_pde && want_mc) t.columns.push_back("diff");

    for (double x : default_x_grid(o, b, 100)) {
        std::vector<double> row{x};
        double pde = 0.0, mc = 0.0;
        if (want_pde) {
            pde = field.ruin_at(x);
            row.push_back(pde);
        }
        if (want_mc) {
            PathBatch pb = estimate_ruin_prob(p, A, b, x, sim_config(o));
            mc = pb.ruin_prob;
            row.push_back(mc);
            row.push_back(pb.ruin_stderr);
        }
        if (want_pde && want_mc) row.push_back(pde - mc);
        t.rows.push_back(std::move(row));
    }
    write_out(o.out, render(t, o.format.empty() ? "csv" : o.format));
    return 0;
}

// ----------------------------------------------------------------- bstar --

int cmd_bstar(const Options& o) {
    if (o.T <= 0.0) throw ConfigError("bstar requires --T");
    const ModelParams base = build_params(o);
    const bool want_eps = !o.eps_grid.empty() || o.b_grid.empty();
    const bool want_b = !o.b_grid.empty() || o.eps_grid.empty();
    const double b0 = compute_b0(base);
    const PdeGrid grid = pde_grid(o);

    std::string text;
    if (want_eps) {
        Table t;
        t.comments.push_back("command: bstar (barrier as a function of epsilon)");
        t.comments.push_back(param_echo(base));
        for (const std::string& n : o.notes) t.comments.push_back(n);
        t.comments.push_back("b0: " + fmt17(b0) + " tol_eps: " + fmt17(BStarOptions{}.tol_eps));
        t.columns = {"epsilon", "b_star", "constrained"};
        const std::vector<double> eps =
            o.eps_grid.empty() ? parse_grid("0.1:0.9:0.1") : parse_grid(o.eps_grid);
        for (double e : eps) {
            ModelParams p = base;
            p.epsilon = e;
            const PolicyDecision dec = decide_policy(p, grid);
            t.rows.push_back({e, dec.chosen_barrier, dec.constrained ? 1.0 : 0.0});
        }
        text += render(t, o.format.empty() ? "csv" : o.format);
    }
    if (want_b) {
        Table t;
        t.comments.push_back("command: bstar (attained risk level as a function of barrier)");
        t.comments.push_back(param_echo(base));
        for (const std::string& n : o.notes) t.comments.push_back(n);
        t.comments.push_back("b0: " + fmt17(b0));
        t.columns = {"b", "epsilon"};
        std::vector<double> bs;
        if (o.b_grid.empty() || o.b_grid == "auto") {
            for (int i = 0; i <= 20; ++i) bs.push_back(b0 + (4.0 * b0 - b0) * i / 20.0);
        } else {
            bs = parse_grid(o.b_grid);
        }
        const RuinCurve curve = ruin_curve(base, base.T, bs, grid, o.threads);
        for (std::size_t i = 0; i < bs.size(); ++i) {
            t.rows.push_back({bs[i], curve.ruin[i]});
        }
        if (want_eps) text += "\n";  // both directions: blank line between tables
        text += render(t, o.format.empty() ? "csv" : o.format);
    }
    write_out(o.out, text);
    return 0;
}

// --------------------------------------------------------------- capital --

int cmd_capital(const Options& o) {
    if (o.T <= 0.0) throw ConfigError("capital requires --T");
    const ModelParams p = build_params(o);
    const double b = o.b > 0.0 ? o.b : compute_b0(p);
    const HjbSolution sol = solve_hjb(p, b);
    const SurvivalField field = solve_survival_pde(p, ControlFunction(sol), b, p.T, pde_grid(o));
    const double floor_eps = field.ruin_at(b);

    const std::vector<double> eps =
        o.eps_grid.empty() ? parse_grid("0.05:0.95:0.05") : parse_grid(o.eps_grid);
    Table t;
    t.comments.push_back("command: capital");
    t.comments.push_back(param_echo(p));
    for (const std::string& n : o.notes) t.comments.push_back(n);
    t.comments.push_back("b=" + fmt17(b) + " ny=" + std::to_string(field.ny) +
                         " nt=" + std::to_string(field.nt));
    std::size_t skipped = 0;
    std::vector<std::vector<double>> rows;
    for (double e : eps) {
        if (floor_eps > e) {
            ++skipped;  // not attainable even with full capital b
            continue;
        }
        rows.push_back({e, risk_capital(field, e)});
    }
    if (rows.empty()) {
        throw Unattainable("capital: no requested risk level is attainable at barrier " +
                           fmt17(b) + "; ruin at full capital is " + fmt17(floor_eps));
    }
    t.comments.push_back("unattainable_epsilon_rows_skipped: " + std::to_string(skipped) +
                         " (ruin at full capital: " + fmt17(floor_eps) + ")");
    t.columns = {"epsilon", "x"};
    t.rows = std::move(rows);
    write_out(o.out, render(t, o.format.empty() ? "csv" : o.format));
    return 0;
}

// --------------------------------------------------------------- presets --

const std::map<std::string, std::vector<std::string>>& preset_args() {
    static const std::map<std::string, std::vector<std::string>> m = {
        {"fig1",
         {"value", "--mu", "2", "--lambda", "6", "--sigma2", "50", "--c", "0.05", "--sweep",
          "sigma2=50,100", "--b", "100", "--x-grid", "0:100:1"}},
        {"fig2",
         {"value", "--mu", "2", "--lambda", "6", "--sigma2", "50", "--c", "0.05", "--sweep",
          "mu=1,2", "--b", "100", "--x-grid", "0:100:1"}},
        {"fig3",
         {"ruin", "--mu", "2", "--lambda", "2.4", "--sigma2", "50", "--c", "0.05", "--T",
          "500", "--b", "100", "--x-grid", "0:100:1", "--ny", "400", "--nt", "4000"}},
        {"fig4",
         {"capital", "--mu", "2", "--lambda", "2.4", "--sigma2", "50", "--c", "0.05", "--T",
          "500", "--b", "100", "--epsilon-grid", "0.05:0.95:0.05", "--ny", "400", "--nt",
          "4000"}},
        {"fig5",
         {"bstar", "--mu", "2", "--lambda", "2.4", "--sigma2", "50", "--c", "0.05", "--T",
          "500", "--epsilon-grid", "0.1:0.9:0.1", "--ny", "400", "--nt", "4000"}},
        {"fig6",
         {"bstar", "--mu", "2", "--lambda", "2.4", "--sigma2", "50", "--c", "0.05", "--T",
          "500", "--b-grid", "auto", "--ny", "400", "--nt", "4000"}},
    };
    return m;
}

const char* kLambdaNote =
    "note: figure captions pair lambda=0.4 with mu=2, infeasible under lambda > mu; "
    "preset uses lambda=2.4 (reading 0.4 as the transaction cost)";

/// Rewrites argv so `--preset figN [overrides...]` becomes the full flag list;
/// user flags come last and win.
std::vector<std::string> expand_presets(std::vector<std::string> args,
                                        std::vector<std::string>& notes) {
    std::string name;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--preset" && i + 1 < args.size()) {
            name = args[++i];
        } else if (args[i].rfind("--preset=", 0) == 0) {
            name = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (name.empty()) return args;
    auto it = preset_args().find(name);
    if (it == preset_args().end()) {
        throw ConfigError("unknown preset '" + name + "' (fig1..fig6)");
    }
    std::vector<std::string> out = it->second;
    notes.push_back("preset: " + name);
    if (name != "fig1" && name != "fig2") notes.push_back(kLambdaNote);
    if (!rest.empty() && rest.front() == out.front()) rest.erase(rest.begin());
    if (!rest.empty() && rest.front()[0] != '-') {
        throw ConfigError("preset '" + name + "' implies subcommand '" + out.front() + "'");
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

void add_common(CLI::App* cmd, Options& o) {
    auto opt = [&](const char* name, auto& var, const char* desc) {
        return cmd->add_option(name, var, desc)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    opt("--mu", o.mu, "insurer safety loading (drift)")->required();
    opt("--lambda", o.lambda, "reinsurer safety loading")->required();
    auto* s2 = opt("--sigma2", o.sigma2, "claim volatility squared");
    opt("--sigma", o.sigma, "claim volatility")->excludes(s2);
    opt("--c", o.c, "dividend discount rate")->required();
    opt("--T", o.T, "solvency horizon");
    opt("--epsilon", o.epsilon, "acceptable ruin probability");
    opt("--out", o.out, "output path (default stdout)");
    opt("--format", o.format, "csv or human");
    opt("--threads", o.threads, "worker threads for sweeps and Monte Carlo");
    opt("--ny", o.ny, "PDE spatial nodes");
    opt("--nt", o.nt, "PDE time steps (0 = automatic)");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Optimal dividend barrier under a solvency constraint"};
    app.require_subcommand(1);

    CLI::App* policy = app.add_subcommand("policy", "decide b0 vs b* and tabulate the value");
    CLI::App* value = app.add_subcommand("value", "value function sweep");
    CLI::App* ruin = app.add_subcommand("ruin", "ruin probability over initial capital");
    CLI::App* bstar = app.add_subcommand("bstar", "constrained barrier vs risk level");
    CLI::App* capital = app.add_subcommand("capital", "risk-based capital over risk level");

    for (CLI::App* cmd : {policy, value, ruin, bstar, capital}) add_common(cmd, o);
    auto opt = [](CLI::App* cmd, const char* name, auto& var, const char* desc) {
        return cmd->add_option(name, var, desc)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    for (CLI::App* cmd : {policy, value, ruin}) {
        opt(cmd, "--x-grid", o.x_grid, "initial-capital grid start:stop:step");
    }
    for (CLI::App* cmd : {value, ruin, bstar, capital}) {
        opt(cmd, "--b", o.b, "dividend barrier (default b0)");
    }
    for (CLI::App* cmd : {value, ruin}) {
        opt(cmd, "--method", o.method, "pde, mc or both");
        opt(cmd, "--dt", o.dt, "Monte Carlo time step (0 = automatic)");
        opt(cmd, "--paths", o.paths, "Monte Carlo paths");
        opt(cmd, "--seed", o.seed, "Monte Carlo seed");
    }
    opt(value, "--sweep", o.sweep, "vary one parameter: key=v1,v2 (mu, lambda, sigma2, c)");
    for (CLI::App* cmd : {bstar, capital}) {
        opt(cmd, "--epsilon-grid", o.eps_grid, "risk-level grid start:stop:step");
    }
    opt(bstar, "--b-grid", o.b_grid, "barrier grid start:stop:step, or 'auto' for [b0, 4 b0]");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_presets(args, o.notes);
        std::vector<std::string> rargs(args.rbegin(), args.rend());  // CLI11 parses reversed
        app.parse(rargs);
        if (policy->parsed()) return cmd_policy(o);
        if (value->parsed()) return cmd_value(o);
        if (ruin->parsed()) return cmd_ruin(o);
        if (bstar->parsed()) return cmd_bstar(o);
        if (capital->parsed()) return cmd_capital(o);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const ConstraintFailure& e) {
        std::cerr << "constraint failure: " << e.what() << "\n";
        return 4;
    }
}
