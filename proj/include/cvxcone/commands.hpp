#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvxcone/grid.hpp"
#include "cvxcone/problems.hpp"
#include "cvxcone/solver.hpp"

namespace cvxcone::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitCertify = 3;

struct Options {
    std::string kind;
    std::string norm = "l2";
    std::string target;
    std::filesystem::path input;  // CSV of grid values
    std::filesystem::path spec;   // JSON problem spec
    int n = 21;
    std::optional<Interval> bounds;
    std::optional<int> dim;
    int width = 1;  // 0 means the two axis directions only (certify)
    std::string cone = "outer";
    double strictness_weight = 0.0;
    std::string quadrature = "trapezoidal";
    double c = 1.0;
    double alpha = -0.1;
    double theta = 0.39269908169872414;
    double eps = 1e-6;
    int max_iter = 100000;
    int contour_levels = 10;
    int bins = 32;
    std::filesystem::path out = "out";
};

int cmd_project(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_solve(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_certify(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err);

struct BenchCell {
    QuadratureRule quadrature = QuadratureRule::trapezoidal;
    int n = 0;
    SolveStatus status = SolveStatus::max_iter;
    double error = 0.0;  // L-infinity error against the exact variant solution
    double seconds = 0.0;
    bool ok = false;
};

/// Variant problem over n in {8, 16, 32, 64} for both quadrature rules.
std::vector<BenchCell> run_bench(const SolverSettings& settings);
std::string bench_markdown(const std::vector<BenchCell>& cells, bool with_times);
std::string bench_csv(const std::vector<BenchCell>& cells);

/// L-infinity distance between a variant solution and the exact minimizer.
double variant_error(const GridFunction& u);

/// Parses `args` (without the program name) and dispatches to a subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvxcone::cli
