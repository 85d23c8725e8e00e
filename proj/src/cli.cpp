#include "gw/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gw/errors.hpp"
#include "gw/gwcore.hpp"
#include "gw/oracle.hpp"
#include "gw/solvers.hpp"
#include "gw/spectral.hpp"

namespace gw::cli {

namespace {

SweepRow sweep_row(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p) {
    const GwProblem problem = build_problem(X, Y, p);
    const auto ev = eigenvalues_symmetric(problem.gamma);
    const double tol = default_negative_tol(problem.gamma);
    SweepRow row;
    row.n = Y.n_points;
    row.matrix_dim = problem.dim();
    row.negative_count = static_cast<std::size_t>(
        std::count_if(ev.begin(), ev.end(), [&](double v) { return v < -tol; }));
    row.min_eigenvalue = ev.front();
    if (X.n_points >= 2 && Y.n_points >= 2 && row.negative_count == 0)
        fail(errc::internal_inconsistency, "sweep found a PSD objective matrix");
    return row;
}

} // namespace

std::vector<SweepRow> sweep_delta(std::size_t m, std::size_t n_min, std::size_t n_max, double p) {
    if (m < 2) fail(errc::invalid_size, "sweep needs m >= 2");
    if (n_min < 2 || n_min > n_max) fail(errc::invalid_size, "sweep needs 2 <= n_min <= n_max");
    const MetricMeasureSpace X = delta_space(m);
    std::vector<SweepRow> rows;
    rows.reserve(n_max - n_min + 1);
    for (std::size_t n = n_min; n <= n_max; ++n) rows.push_back(sweep_row(X, delta_space(n), p));
    return rows;
}

std::vector<SweepRow> sweep_curves(const Curve3D& curve_x, const Curve3D& curve_y, std::size_t m,
                                   std::size_t n_min, std::size_t n_max, double p) {
    if (m < 2) fail(errc::invalid_size, "sweep needs m >= 2");
    if (n_min < 2 || n_min > n_max) fail(errc::invalid_size, "sweep needs 2 <= n_min <= n_max");
    const MetricMeasureSpace X = arc_length_space(subsample_curve(curve_x, m));
    std::vector<SweepRow> rows;
    rows.reserve(n_max - n_min + 1);
    for (std::size_t n = n_min; n <= n_max; ++n)
        rows.push_back(sweep_row(X, arc_length_space(subsample_curve(curve_y, n)), p));
    return rows;
}

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        fail(errc::dimension_mismatch, "correlation needs two equally sized samples");
    const auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n, 0.0);
        std::size_t lo = 0;
        while (lo < n) {
            std::size_t hi = lo;
            while (hi + 1 < n && v[order[hi + 1]] == v[order[lo]]) ++hi;
            const double avg = 0.5 * static_cast<double>(lo + hi) + 1.0;
            for (std::size_t k = lo; k <= hi; ++k) r[order[k]] = avg;
            lo = hi + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - mean_a) * (rb[i] - mean_b);
        var_a += (ra[i] - mean_a) * (ra[i] - mean_a);
        var_b += (rb[i] - mean_b) * (rb[i] - mean_b);
    }
    if (var_a == 0.0 || var_b == 0.0) return 0.0;
    return cov / std::sqrt(var_a * var_b);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "n,matrix_dim,negative_count,min_eigenvalue\n";
    const auto prec = out.precision(17);
    for (const auto& r : rows)
        out << r.n << "," << r.matrix_dim << "," << r.negative_count << "," << r.min_eigenvalue
            << "\n";
    out.precision(prec);
}

QapCheckOutcome qap_check(const MetricMeasureSpace& X, const MetricMeasureSpace& Y,
                          std::size_t trials, std::uint64_t seed) {
    const GwProblem problem = build_problem(X, Y, 2.0);
    Rng rng(seed);
    QapCheckOutcome outcome;
    outcome.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const Coupling c = random_feasible_coupling(X.measure, Y.measure, rng);
        const double direct = objective(problem, c);
        const auto split = qap_decompose(X, Y, c);
        const double rel = std::abs(split.constant + split.cross_term - direct) /
                           std::max(1.0, std::abs(direct));
        outcome.worst_rel_error = std::max(outcome.worst_rel_error, rel);
        if (rel > 1e-12) ++outcome.failures;
    }
    return outcome;
}

namespace {

int exit_code_for(const error& e) {
    switch (e.code()) {
    case errc::internal_inconsistency: return 3;
    case errc::too_many_dof: return 4;
    default: return 2;
    }
}

SpaceFormat parse_format(const std::string& name) {
    if (name == "distance-matrix") return SpaceFormat::distance_matrix_csv;
    if (name == "point-cloud") return SpaceFormat::point_cloud_csv;
    if (name == "curve") return SpaceFormat::curve_csv;
    fail(errc::parse_error, "unknown space format: " + name);
}

// A space argument is either a file path or "delta:N".
MetricMeasureSpace load_space_arg(const std::string& arg, const std::string& format,
                                  std::ostream& err) {
    MetricMeasureSpace space;
    if (arg.rfind("delta:", 0) == 0) {
        const std::string tail = arg.substr(6);
        char* end = nullptr;
        const unsigned long n = std::strtoul(tail.c_str(), &end, 10);
        if (end == tail.c_str() || *end != '\0')
            fail(errc::parse_error, "cannot parse point count in '" + arg + "'");
        space = delta_space(n);
    } else {
        space = load_space(arg, parse_format(format));
    }
    if (space.triangle_violations > 0)
        err << "warning: " << arg << ": " << space.triangle_violations
            << " triangle inequality violation(s); continuing (the program does not require them)\n";
    return space;
}

void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history) {
    std::ofstream out(path);
    if (!out) fail(errc::parse_error, "cannot open trace file for writing: " + path);
    out.precision(17);
    out << "iteration,value,gap\n";
    for (const auto& h : history) out << h.iteration << "," << h.value << "," << h.gap << "\n";
}

nlohmann::json coupling_rows(const Coupling& c) {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < c.m; ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t j = 0; j < c.n; ++j) row.push_back(c.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

int default_grid_resolution(std::size_t dof) {
    switch (dof) {
    case 0:
    case 1: return 1000;
    case 2: return 300;
    case 3: return 80;
    default: return 40;
    }
}

struct Args {
    std::string space_x, space_y;
    std::string format_x = "distance-matrix", format_y = "distance-matrix";
    double p = 1.0;
    std::string out_path;
    std::string trace_path;
    std::string method = "multistart";
    std::string init = "independence";
    std::string regime = "stable";
    double tol = 1e-8;
    double epsilon = 0.0; // 0 = auto
    int max_iter = 1000;
    int outer_iters = 200;
    int sinkhorn_iters = 100;
    int k = 8;
    int resolution = 0; // 0 = auto
    bool with_oracle = false;
    std::uint64_t seed = 42;
    std::size_t m = 2, n_min = 2, n_max = 50;
    std::size_t curve_m = 50, curve_n_min = 10, curve_n_max = 50;
    std::size_t samples = 200;
    std::size_t trials = 100;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Workbench for the non-convex quadratic program behind the Gromov-Wasserstein "
                 "distance between finite metric-measure spaces"};
    app.name("gw");
    Args a;

    const auto add_spaces = [&](CLI::App* cmd) {
        cmd->add_option("space-x", a.space_x, "first space: CSV path or delta:N")->required();
        cmd->add_option("space-y", a.space_y, "second space: CSV path or delta:N")->required();
        cmd->add_option("--format-x", a.format_x, "distance-matrix|point-cloud|curve")
            ->check(CLI::IsMember({"distance-matrix", "point-cloud", "curve"}));
        cmd->add_option("--format-y", a.format_y, "distance-matrix|point-cloud|curve")
            ->check(CLI::IsMember({"distance-matrix", "point-cloud", "curve"}));
    };

    auto* cmd_gamma = app.add_subcommand("gamma", "dump the flattened objective matrix");
    add_spaces(cmd_gamma);
    cmd_gamma->add_option("--p", a.p, "cost exponent (>= 1)");
    cmd_gamma->add_option("--out", a.out_path, ".json or .csv output path (default: JSON to stdout)");

    auto* cmd_spectrum = app.add_subcommand("spectrum", "non-convexity certificate");
    add_spaces(cmd_spectrum);
    cmd_spectrum->add_option("--p", a.p, "cost exponent (>= 1)");

    auto* cmd_solve = app.add_subcommand("solve", "run a local solver");
    add_spaces(cmd_solve);
    cmd_solve->add_option("--p", a.p, "cost exponent (>= 1)");
    cmd_solve->add_option("--method", a.method, "fw|entropic|multistart")
        ->check(CLI::IsMember({"fw", "entropic", "multistart"}));
    cmd_solve->add_option("--init", a.init, "independence|diagonal")
        ->check(CLI::IsMember({"independence", "diagonal"}));
    cmd_solve->add_option("--tol", a.tol, "stationarity gap tolerance");
    cmd_solve->add_option("--max-iter", a.max_iter, "Frank-Wolfe iteration cap");
    cmd_solve->add_option("--epsilon", a.epsilon, "entropic regularization (0 = auto)");
    cmd_solve->add_option("--outer-iters", a.outer_iters, "entropic outer steps");
    cmd_solve->add_option("--sinkhorn-iters", a.sinkhorn_iters, "scaling passes per outer step");
    cmd_solve->add_option("--k", a.k, "number of multistart runs");
    cmd_solve->add_option("--seed", a.seed, "random seed");
    cmd_solve->add_flag("--oracle", a.with_oracle, "cross-check against the global oracle");
    cmd_solve->add_option("--resolution", a.resolution, "oracle grid resolution (0 = auto)");
    cmd_solve->add_option("--trace", a.trace_path, "write iteration,value,gap CSV here");

    auto* cmd_sweep_delta = app.add_subcommand("sweep-delta", "eigenvalue counts over unit-distance spaces");
    cmd_sweep_delta->add_option("--m", a.m, "points in the fixed space");
    cmd_sweep_delta->add_option("--n-min", a.n_min, "first size of the varying space");
    cmd_sweep_delta->add_option("--n-max", a.n_max, "last size of the varying space");
    cmd_sweep_delta->add_option("--p", a.p, "cost exponent (>= 1)");
    cmd_sweep_delta->add_option("--out", a.out_path, "CSV output path")->required();

    auto* cmd_sweep_curves = app.add_subcommand("sweep-curves", "eigenvalue counts over arc-length spaces");
    cmd_sweep_curves->add_option("curve-x", a.space_x, "first trajectory CSV (x,y,z rows)")->required();
    cmd_sweep_curves->add_option("curve-y", a.space_y, "second trajectory CSV (x,y,z rows)")->required();
    cmd_sweep_curves->add_option("--m", a.curve_m, "samples kept from the first trajectory");
    cmd_sweep_curves->add_option("--n-min", a.curve_n_min, "first sample count");
    cmd_sweep_curves->add_option("--n-max", a.curve_n_max, "last sample count");
    cmd_sweep_curves->add_option("--p", a.p, "cost exponent (>= 1)");
    cmd_sweep_curves->add_option("--out", a.out_path, "CSV output path")->required();

    auto* cmd_qap = app.add_subcommand("qap-check", "verify the squared-loss assignment identity");
    add_spaces(cmd_qap);
    cmd_qap->add_option("--trials", a.trials, "random couplings to test");
    cmd_qap->add_option("--seed", a.seed, "random seed");

    auto* cmd_gen = app.add_subcommand("gen-curve",
                                       "write a stand-in oscillator trajectory CSV (for self-contained sweeps)");
    cmd_gen->add_option("--regime", a.regime, "stable|unstable")
        ->check(CLI::IsMember({"stable", "unstable"}));
    cmd_gen->add_option("--samples", a.samples, "number of samples");
    cmd_gen->add_option("--out", a.out_path, "CSV output path")->required();

    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("gw");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(cmd_gamma)) {
            const auto X = load_space_arg(a.space_x, a.format_x, err);
            const auto Y = load_space_arg(a.space_y, a.format_y, err);
            const GwProblem problem = build_problem(X, Y, a.p);
            if (a.out_path.empty()) {
                write_gamma_json(out, problem);
            } else {
                std::ofstream file(a.out_path);
                if (!file) fail(errc::parse_error, "cannot open output file: " + a.out_path);
                if (a.out_path.size() >= 4 && a.out_path.substr(a.out_path.size() - 4) == ".csv")
                    write_gamma_csv(file, problem);
                else
                    write_gamma_json(file, problem);
            }
            return 0;
        }

        if (app.got_subcommand(cmd_spectrum)) {
            const auto X = load_space_arg(a.space_x, a.format_x, err);
            const auto Y = load_space_arg(a.space_y, a.format_y, err);
            const SpectralReport report = certify_nonconvex(build_problem(X, Y, a.p));
            write_report_json(out, report);
            return 0;
        }

        if (app.got_subcommand(cmd_solve)) {
            const auto X = load_space_arg(a.space_x, a.format_x, err);
            const auto Y = load_space_arg(a.space_y, a.format_y, err);
            const GwProblem problem = build_problem(X, Y, a.p);
            const Coupling init = (a.init == "diagonal")
                                      ? diagonal_coupling(X.measure)
                                      : independence_coupling(X.measure, Y.measure);
            SolveResult result;
            if (a.method == "fw") {
                result = frank_wolfe(problem, init, a.max_iter, a.tol);
            } else if (a.method == "entropic") {
                const double eps = a.epsilon > 0.0 ? a.epsilon : default_epsilon(problem);
                result = entropic_gw(problem, eps, a.outer_iters, a.sinkhorn_iters, init);
            } else {
                result = multistart(problem, a.k, a.seed, a.max_iter, a.tol);
            }

            nlohmann::json j;
            j["method"] = a.method;
            j["m"] = problem.m;
            j["n"] = problem.n;
            j["p"] = problem.p;
            j["value"] = result.value;
            j["distance"] = result.distance;
            j["iterations"] = result.iterations;
            j["fw_gap"] = result.fw_gap;
            j["coupling"] = coupling_rows(result.coupling);

            if (a.with_oracle) {
                const std::size_t dof = coupling_dof(problem.m, problem.n);
                if (dof > 4)
                    fail(errc::too_many_dof,
                         "oracle cross-check supports at most 4 coupling degrees of freedom");
                const OracleResult oracle =
                    (problem.m == 2 && problem.n == 2)
                        ? oracle_1dof(problem)
                        : oracle_grid(problem, a.resolution > 0 ? a.resolution
                                                                : default_grid_resolution(dof));
                j["oracle_value"] = oracle.value;
                j["oracle_gap"] = result.value - oracle.value;
                j["oracle_error_bound"] = oracle.error_bound;
            }
            out << j.dump(2) << "\n";
            if (!a.trace_path.empty()) write_history_csv(a.trace_path, result.history);
            return 0;
        }

        if (app.got_subcommand(cmd_sweep_delta) || app.got_subcommand(cmd_sweep_curves)) {
            std::vector<SweepRow> rows;
            nlohmann::json j;
            if (app.got_subcommand(cmd_sweep_delta)) {
                rows = sweep_delta(a.m, a.n_min, a.n_max, a.p);
            } else {
                rows = sweep_curves(load_curve(a.space_x), load_curve(a.space_y), a.curve_m,
                                    a.curve_n_min, a.curve_n_max, a.p);
                j["sampling"] = "even-index-subsampling-with-endpoints";
            }
            std::ofstream file(a.out_path);
            if (!file) fail(errc::parse_error, "cannot open output file: " + a.out_path);
            write_sweep_csv(file, rows);

            std::vector<double> ns, counts;
            for (const auto& r : rows) {
                ns.push_back(static_cast<double>(r.n));
                counts.push_back(static_cast<double>(r.negative_count));
            }
            j["rows"] = rows.size();
            j["out"] = a.out_path;
            if (rows.size() >= 2) j["spearman_count_vs_n"] = spearman_correlation(counts, ns);
            out << j.dump(2) << "\n";
            return 0;
        }

        if (app.got_subcommand(cmd_qap)) {
            const auto X = load_space_arg(a.space_x, a.format_x, err);
            const auto Y = load_space_arg(a.space_y, a.format_y, err);
            const QapCheckOutcome outcome = qap_check(X, Y, a.trials, a.seed);
            nlohmann::json j;
            j["trials"] = outcome.trials;
            j["failures"] = outcome.failures;
            j["worst_rel_error"] = outcome.worst_rel_error;
            out << j.dump(2) << "\n";
            return outcome.failures == 0 ? 0 : 5;
        }

        if (app.got_subcommand(cmd_gen)) {
            const auto regime = (a.regime == "stable") ? OscillatorRegime::stable
                                                       : OscillatorRegime::unstable;
            write_curve_csv(a.out_path, standin_oscillator_curve(regime, a.samples));
            return 0;
        }
    } catch (const error& e) {
        err << errc_name(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace gw::cli
