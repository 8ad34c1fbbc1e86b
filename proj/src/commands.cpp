#include "cvxcone/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvxcone/analytic.hpp"
#include "cvxcone/cone.hpp"
#include "cvxcone/errors.hpp"
#include "cvxcone/grid_io.hpp"
#include "cvxcone/postprocess.hpp"
#include "cvxcone/stencil.hpp"
#include "cvxcone/targets.hpp"

namespace cvxcone::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

SolverSettings settings_from(const Options& opt) {
    if (!(opt.eps > 0.0)) throw InvalidArgument("--eps must be positive");
    if (opt.max_iter < 1) throw InvalidArgument("--max-iter must be at least 1");
    SolverSettings st;
    st.eps_abs = opt.eps;
    st.eps_rel = opt.eps;
    st.max_iter = opt.max_iter;
    return st;
}

json settings_json(const SolverSettings& st) {
    return {{"eps_abs", st.eps_abs},   {"eps_rel", st.eps_rel}, {"max_iter", st.max_iter}, {"rho", st.rho},
            {"sigma", st.sigma},       {"alpha", st.alpha},     {"adaptive_rho", st.adaptive_rho},
            {"polish", st.polish},     {"scaling_iter", st.scaling_iter}};
}

json solution_summary(const Solution& sol, double functional) {
    json j = to_json(sol);
    j.erase("x");
    j["polished"] = sol.polished;
    j["functional"] = std::isfinite(functional) ? json(functional) : json(nullptr);
    return j;
}

TargetParams target_params(const Options& opt) {
    TargetParams tp;
    tp.alpha = opt.alpha;
    tp.theta = opt.theta;
    tp.c = opt.c;
    return tp;
}

int count_csv_values(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int count = -1;  // header
    while (std::getline(in, line))
        if (!line.empty() && line != "\r") ++count;
    return count;
}

// Grid function given by --input (CSV) or --target (builtin name).
GridFunction input_function(const Options& opt) {
    if (!opt.input.empty()) {
        std::string text = read_text_file(opt.input);
        int dim = opt.dim.value_or(0);
        if (dim == 0) {
            int values = count_csv_values(text);
            if (values == opt.n)
                dim = 1;
            else if (values == opt.n * opt.n)
                dim = 2;
            else
                throw ParseError("CSV has " + std::to_string(values) + " values, expected n or n^2 for n = " +
                                 std::to_string(opt.n));
        }
        Grid grid(dim, opt.n, opt.bounds.value_or(Interval{}));
        return from_csv(text, grid);
    }
    if (opt.target.empty()) throw InvalidArgument("one of --target or --input is required");
    int dim = opt.dim.value_or(default_dim(opt.target));
    Grid grid(dim, opt.n, opt.bounds.value_or(default_bounds(opt.target)));
    return sample(grid, builtin_target(opt.target, target_params(opt)));
}

ProblemSpec spec_from_file(const Options& opt) {
    json j;
    try {
        j = json::parse(read_text_file(opt.spec));
    } catch (const json::parse_error& e) {
        throw InvalidSpec(std::string("cannot parse spec: ") + e.what());
    }
    return problem_spec_from_json(j, opt.spec.parent_path());
}

void apply_common(const Options& opt, ProblemSpec& spec) {
    spec.width = opt.width;
    spec.cone = parse_cone_kind(opt.cone);
    spec.strictness_weight = opt.strictness_weight;
    spec.quadrature = parse_quadrature(opt.quadrature);
    spec.c = opt.c;
}

struct RunOutputs {
    std::vector<std::string> files;
    json metrics = json::object();
};

void write_file(const Options& opt, RunOutputs& outs, const std::string& name, const std::string& text) {
    write_text_file(opt.out / name, text);
    outs.files.push_back((opt.out / name).string());
}

void write_run_record(const Options& opt, const std::string& command, const json& spec, const SolverSettings& st,
                      const json& solution, RunOutputs& outs, double seconds, int exit_code) {
    outs.files.push_back((opt.out / "run_record.json").string());
    json record = {{"command", command},
                   {"spec", spec},
                   {"settings", settings_json(st)},
                   {"solution", solution},
                   {"metrics", outs.metrics},
                   {"wall_time_seconds", seconds},
                   {"timestamp", utc_timestamp()},
                   {"outputs", outs.files},
                   {"exit_code", exit_code}};
    write_text_file(opt.out / "run_record.json", record.dump(2) + "\n");
}

json spec_echo(const ProblemSpec& spec, const Options& opt) {
    json j = to_json(spec);
    if (!opt.spec.empty()) j["spec_file"] = opt.spec.string();
    if (!opt.input.empty()) j["input"] = opt.input.string();
    if (!opt.target.empty()) j["target"] = opt.target;
    return j;
}

// Solves, writes the solution files, and returns the exit code.
int solve_and_write(const Options& opt, const std::string& command, const ProblemSpec& spec, std::ostream& out,
                    bool postprocess) {
    const SolverSettings st = settings_from(opt);
    const auto start = Clock::now();
    const QpProblem qp = build_problem(spec);
    const Solution sol = solve(qp, st);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    RunOutputs outs;
    const bool have_x = sol.x.allFinite();
    const double functional = have_x ? functional_value(qp, sol.x) : std::nan("");
    if (have_x) {
        GridFunction u(spec.grid, qp.grid_values(sol.x));
        write_file(opt, outs, "solution.csv", to_csv(u));
        json sj = to_json(sol);
        sj["functional"] = functional;
        sj["grid"] = grid_to_json(spec.grid);
        write_file(opt, outs, "solution.json", sj.dump(2) + "\n");

        if (spec.kind == ProblemKind::monopolist_variant) outs.metrics["linf_error"] = variant_error(u);
        if (spec.kind == ProblemKind::custom_1d_source && spec.grid.dim() == 1) {
            auto exact = analytic::Step1DSolution::optimal(spec.c);
            double err = 0.0;
            for (int k = 0; k < spec.grid.size(); ++k) err = std::max(err, std::abs(u[k] - exact(spec.grid.point(k)[0])));
            outs.metrics["linf_error"] = err;
            outs.metrics["exact_objective"] = exact.objective();
        }
        if (spec.kind == ProblemKind::monopolist_variant) outs.metrics["exact_objective"] = -analytic::VariantSolution::value();

        if (postprocess) {
            GradientMap g = gradient_map(u);
            write_file(opt, outs, "gradient_map.csv", to_csv(g, spec.grid));
            if (spec.grid.dim() == 2) {
                write_file(opt, outs, "gradient_histogram.csv", to_csv(gradient_histogram(g, opt.bins)));
                auto lines = contours(u, contour_levels(u, opt.contour_levels));
                write_file(opt, outs, "contours.json", to_json(lines).dump() + "\n");
            }
        }
    } else {
        json sj = to_json(sol);
        write_file(opt, outs, "solution.json", sj.dump(2) + "\n");
    }

    const bool optimal = sol.status == SolveStatus::optimal;
    const int code = optimal ? kExitOk : kExitSolver;
    write_run_record(opt, command, spec_echo(spec, opt), st, solution_summary(sol, functional), outs, seconds, code);

    out << "status: " << to_string(sol.status) << "\n";
    out << "iterations: " << sol.iterations << "\n";
    if (have_x) out << "objective: " << format_double(functional) << "\n";
    for (const auto& [key, value] : outs.metrics.items()) out << key << ": " << format_double(value.get<double>()) << "\n";
    out << "outputs: " << opt.out.string() << "\n";
    return code;
}

std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", e);
    return buf;
}

}  // namespace

double variant_error(const GridFunction& u) {
    double err = 0.0;
    for (int k = 0; k < u.grid.size(); ++k) {
        auto p = u.grid.point(k);
        err = std::max(err, std::abs(u[k] - analytic::variant_value(p[0], p[1])));
    }
    return err;
}

int cmd_project(const Options& opt, std::ostream& out, std::ostream&) {
    ProblemSpec spec;
    if (!opt.spec.empty()) {
        spec = spec_from_file(opt);
    } else {
        spec.kind = opt.kind.empty() ? ProblemKind::projection : parse_problem_kind(opt.kind);
        if (spec.kind != ProblemKind::projection && spec.kind != ProblemKind::convex_envelope)
            throw InvalidArgument("project supports --kind projection or convex_envelope");
        spec.norm = parse_norm(opt.norm);
        GridFunction target = input_function(opt);
        spec.grid = target.grid;
        spec.target = std::move(target);
        apply_common(opt, spec);
    }
    return solve_and_write(opt, "project", spec, out, false);
}

int cmd_solve(const Options& opt, std::ostream& out, std::ostream&) {
    ProblemSpec spec;
    if (!opt.spec.empty()) {
        spec = spec_from_file(opt);
    } else {
        if (opt.kind.empty()) throw InvalidArgument("--kind is required");
        apply_common(opt, spec);
        if (opt.kind == "step1d") {
            spec.kind = ProblemKind::custom_1d_source;
            spec.grid = Grid::line(opt.n, opt.bounds.value_or(default_bounds("step")));
            spec.source = sample(spec.grid, builtin_target("step", target_params(opt)));
        } else {
            spec.kind = parse_problem_kind(opt.kind);
            if (spec.kind != ProblemKind::monopolist && spec.kind != ProblemKind::monopolist_variant &&
                spec.kind != ProblemKind::rochet_chone)
                throw InvalidArgument("solve supports --kind monopolist, monopolist_variant, rochet_chone, step1d");
            spec.grid = Grid::square(opt.n, opt.bounds.value_or(Interval{}));
        }
    }
    return solve_and_write(opt, "solve", spec, out, true);
}

int cmd_certify(const Options& opt, std::ostream& out, std::ostream&) {
    const auto start = Clock::now();
    GridFunction u = input_function(opt);
    if (opt.width < 0) throw InvalidArgument("--width must be non-negative");
    StencilSet stencil = opt.width == 0 && u.grid.dim() == 2
                             ? make_stencil(std::vector<Direction>{Direction(1, 0), Direction(0, 1)}, 2)
                             : make_stencil(std::max(opt.width, 1), u.grid.dim());
    const ConeKind cone = parse_cone_kind(opt.cone);
    CertificateReport report = certify(u, stencil);
    json j = to_json(report);
    bool feasible = report.feasible;
    if (cone == ConeKind::inner) {
        InnerConeCheck inner = check_inner_cone(u, stencil);
        j["inner"] = {{"feasible", inner.feasible}, {"min", inner.min_value}, {"max", inner.max_value}};
        feasible = inner.feasible;
    }
    j["cone"] = to_string(cone);
    j["width"] = opt.width;
    j["grid"] = grid_to_json(u.grid);
    const int code = feasible ? kExitOk : kExitCertify;

    RunOutputs outs;
    write_file(opt, outs, "certificate.json", j.dump(2) + "\n");
    json spec = {{"grid", grid_to_json(u.grid)}, {"width", opt.width}, {"cone", to_string(cone)}};
    if (!opt.input.empty()) spec["input"] = opt.input.string();
    if (!opt.target.empty()) spec["target"] = opt.target;
    outs.metrics["worst_margin"] = std::isfinite(report.worst_margin) ? json(report.worst_margin) : json(nullptr);
    outs.metrics["violations"] = report.violations.size();
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    write_run_record(opt, "certify", spec, settings_from(opt), json{{"feasible", feasible}}, outs, seconds, code);

    out << (feasible ? "feasible" : "infeasible") << "\n";
    out << "worst_margin: " << format_double(report.worst_margin) << "\n";
    out << "violations: " << report.violations.size() << "\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(report.violations.size(), 5); ++k) {
        const auto& v = report.violations[k];
        out << "  node (" << v.node[0] << ", " << v.node[1] << ") direction (" << v.direction.p << ", "
            << v.direction.q << ") value " << format_double(v.value) << "\n";
    }
    return code;
}

std::vector<BenchCell> run_bench(const SolverSettings& settings) {
    std::vector<BenchCell> cells;
    for (QuadratureRule rule : {QuadratureRule::zeroth, QuadratureRule::trapezoidal})
        for (int n : {8, 16, 32, 64}) {
            BenchCell cell;
            cell.quadrature = rule;
            cell.n = n;
            const auto start = Clock::now();
            try {
                ProblemSpec spec;
                spec.kind = ProblemKind::monopolist_variant;
                spec.grid = Grid::square(n);
                spec.quadrature = rule;
                QpProblem qp = build_problem(spec);
                Solution sol = solve(qp, settings);
                cell.status = sol.status;
                cell.ok = sol.status == SolveStatus::optimal;
                if (cell.ok) cell.error = variant_error(GridFunction(spec.grid, qp.grid_values(sol.x)));
            } catch (const std::exception&) {
                cell.ok = false;
            }
            cell.seconds = std::chrono::duration<double>(Clock::now() - start).count();
            cells.push_back(cell);
        }
    return cells;
}

namespace {

const char* method_name(QuadratureRule rule) {
    return rule == QuadratureRule::zeroth ? "Zeroth Order Quadrature" : "Trapezoidal Rule Quadrature";
}

std::string markdown_table(const std::vector<BenchCell>& cells, const std::string& title, bool times) {
    std::ostringstream os;
    std::vector<int> ns;
    for (const auto& c : cells)
        if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
    os << "| " << title << " |";
    for (int n : ns) os << " n=" << n << " |";
    os << "\n|---|";
    for (std::size_t k = 0; k < ns.size(); ++k) os << "---|";
    os << "\n";
    for (QuadratureRule rule : {QuadratureRule::zeroth, QuadratureRule::trapezoidal}) {
        os << "| " << method_name(rule) << " |";
        for (int n : ns) {
            std::string v = "x";
            for (const auto& c : cells)
                if (c.quadrature == rule && c.n == n) {
                    if (times)
                        v = format_error(c.seconds);
                    else if (c.ok)
                        v = format_error(c.error);
                }
            os << " " << v << " |";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace

std::string bench_markdown(const std::vector<BenchCell>& cells, bool with_times) {
    std::string s = markdown_table(cells, "L-infinity error", false);
    if (with_times) s += "\n" + markdown_table(cells, "Wall time (s)", true);
    return s;
}

std::string bench_csv(const std::vector<BenchCell>& cells) {
    std::ostringstream os;
    os << "quadrature,n,status,linf_error\n";
    for (const auto& c : cells)
        os << to_string(c.quadrature) << ',' << c.n << ',' << to_string(c.status) << ','
           << (c.ok ? format_double(c.error) : "x") << '\n';
    return os.str();
}

int cmd_bench(const Options& opt, std::ostream& out, std::ostream&) {
    const SolverSettings st = settings_from(opt);
    const auto start = Clock::now();
    std::vector<BenchCell> cells = run_bench(st);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    RunOutputs outs;
    write_file(opt, outs, "bench.md", bench_markdown(cells, false));
    write_file(opt, outs, "bench.csv", bench_csv(cells));
    json timing = json::array();
    for (const auto& c : cells)
        timing.push_back({{"quadrature", to_string(c.quadrature)}, {"n", c.n}, {"seconds", c.seconds}});
    outs.metrics["cells"] = timing;
    json spec = {{"kind", "monopolist_variant"}, {"n", {8, 16, 32, 64}}, {"quadrature", {"zeroth", "trapezoidal"}}};
    write_run_record(opt, "bench", spec, st, json{{"cells", cells.size()}}, outs, seconds, kExitOk);

    out << bench_markdown(cells, true);
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Variational problems under discrete convexity constraints", "cvxcone"};
    app.require_subcommand(1);
    Options opt;
    std::vector<double> bounds;
    int dim = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", opt.n, "Grid points per axis")->check(CLI::PositiveNumber);
        sub->add_option("--bounds", bounds, "Domain interval lo,hi (per axis)")->expected(2)->delimiter(',');
        sub->add_option("--dim", dim, "Grid dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
        sub->add_option("--width", opt.width, "Stencil width");
        sub->add_option("--cone", opt.cone, "outer or inner")->check(CLI::IsMember({"outer", "inner"}));
        sub->add_option("--target", opt.target, "Builtin target function");
        sub->add_option("--input", opt.input, "CSV of grid values");
        sub->add_option("--alpha", opt.alpha, "Rotated quadratic eigenvalue");
        sub->add_option("--theta", opt.theta, "Rotated quadratic angle");
        sub->add_option("--c", opt.c, "Cost or source scale");
        sub->add_option("--eps", opt.eps, "Solver tolerance");
        sub->add_option("--max-iter", opt.max_iter, "Solver iteration limit");
        sub->add_option("--out", opt.out, "Output directory");
    };
    auto add_problem = [&](CLI::App* sub) {
        sub->add_option("--kind", opt.kind, "Problem kind");
        sub->add_option("--spec", opt.spec, "JSON problem spec");
        sub->add_option("--strictness-weight", opt.strictness_weight, "Inner-cone strictness weight");
        sub->add_option("--quadrature", opt.quadrature, "zeroth or trapezoidal")
            ->check(CLI::IsMember({"zeroth", "trapezoidal"}));
    };

    auto* project = app.add_subcommand("project", "Project a function onto the discrete convex cone");
    add_common(project);
    add_problem(project);
    project->add_option("--norm", opt.norm, "l1, l2, linf, h1, h1_0, h1_gradbox");
    auto* solve_cmd = app.add_subcommand("solve", "Solve a monopolist or 1D source problem");
    add_common(solve_cmd);
    add_problem(solve_cmd);
    solve_cmd->add_option("--contour-levels", opt.contour_levels, "Number of contour levels")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--bins", opt.bins, "Gradient histogram bins per axis")->check(CLI::PositiveNumber);
    auto* certify_cmd = app.add_subcommand("certify", "Check discrete convexity of sampled values");
    add_common(certify_cmd);
    auto* bench = app.add_subcommand("bench", "Error table for the monopolist variant");
    bench->add_option("--eps", opt.eps, "Solver tolerance");
    bench->add_option("--max-iter", opt.max_iter, "Solver iteration limit");
    bench->add_option("--out", opt.out, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!bounds.empty()) opt.bounds = Interval{bounds[0], bounds[1]};
    if (dim != 0) opt.dim = dim;

    try {
        if (project->parsed()) return cmd_project(opt, out, err);
        if (solve_cmd->parsed()) return cmd_solve(opt, out, err);
        if (certify_cmd->parsed()) return cmd_certify(opt, out, err);
        return cmd_bench(opt, out, err);
    } catch (const InvalidProblem& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SamplingError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace cvxcone::cli
