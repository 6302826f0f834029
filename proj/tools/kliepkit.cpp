// Command-line frontend: hull diagnosis, penalized fitting, toy profiles,
// the simulation experiment grid, and SVG summaries of saved records.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical or solver
// failure, 4 I/O failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kliepkit/kliepkit.hpp"

namespace {

using nlohmann::json;

// Whitespace-separated numeric matrix from a file, or stdin for "-".
Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
        file.open(path);
        if (!file) throw kliepkit::IoError("cannot open input file: " + path);
        in = &file;
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(*in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (!ss.eof())
            throw kliepkit::ConfigError("non-numeric token in matrix input: " + path);
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw kliepkit::DimensionError("ragged rows in matrix input: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw kliepkit::EmptySampleError("no rows in matrix input: " + path);
    Eigen::MatrixXd M(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
    return M;
}

Eigen::VectorXd read_vector(const std::string& path) {
    Eigen::MatrixXd M = read_matrix(path);
    if (M.rows() != 1 && M.cols() != 1)
        throw kliepkit::DimensionError("expected a vector (one row or one column): " + path);
    if (M.rows() == 1) return M.row(0).transpose();
    return M.col(0);
}

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

struct SummaryInputs {
    std::string tbar_path, ty_path;   // precomputed statistics
    std::string x_path, y_path;       // raw observations
    std::string statistic = "gaussian_pairwise";
};

void add_summary_options(CLI::App* cmd, SummaryInputs& in) {
    cmd->add_option("--tbar", in.tbar_path, "numerator mean statistic (vector file, '-' stdin)");
    cmd->add_option("--ty", in.ty_path, "denominator statistics (matrix file, '-' stdin)");
    cmd->add_option("--x", in.x_path, "raw numerator observations (matrix file)");
    cmd->add_option("--y", in.y_path, "raw denominator observations (matrix file)");
    cmd->add_option("--statistic", in.statistic,
                    "statistic map for raw observations: identity | gaussian_pairwise")
        ->check(CLI::IsMember({"identity", "gaussian_pairwise"}));
}

kliepkit::SufficientSummary load_summary(const SummaryInputs& in) {
    const bool precomputed = !in.tbar_path.empty() || !in.ty_path.empty();
    const bool raw = !in.x_path.empty() || !in.y_path.empty();
    if (precomputed == raw)
        throw kliepkit::ConfigError("provide either --tbar/--ty or --x/--y, not both");
    if (precomputed) {
        if (in.tbar_path.empty() || in.ty_path.empty())
            throw kliepkit::ConfigError("--tbar and --ty must be given together");
        return kliepkit::make_summary(read_vector(in.tbar_path), read_matrix(in.ty_path));
    }
    if (in.x_path.empty() || in.y_path.empty())
        throw kliepkit::ConfigError("--x and --y must be given together");
    Eigen::MatrixXd X = read_matrix(in.x_path);
    Eigen::MatrixXd Y = read_matrix(in.y_path);
    const int m = static_cast<int>(X.cols());
    auto map = in.statistic == "identity" ? kliepkit::StatisticMap::identity(m)
                                          : kliepkit::StatisticMap::gaussian_pairwise(m);
    return kliepkit::summarize(map, X, Y);
}

kliepkit::DualNorm parse_norm(const std::string& s) {
    return s == "l2" ? kliepkit::DualNorm::L2 : kliepkit::DualNorm::Linf;
}

int run_diagnose(const SummaryInputs& in, const std::string& norm, double tol) {
    kliepkit::SufficientSummary s = load_summary(in);
    kliepkit::HullClassification cls = kliepkit::classify_hull(s, tol);
    json out;
    out["classification"] = kliepkit::to_string(cls.kind);
    out["lp_value"] = std::isfinite(cls.lp_value) ? json(cls.lp_value) : json(nullptr);
    if (cls.weights.size()) out["weights"] = vec_to_json(cls.weights);
    if (cls.kind == kliepkit::HullClassification::Kind::Outside && cls.separator.size()) {
        out["separator"] = vec_to_json(cls.separator);
        out["margin"] = cls.margin;
    }
    json ls = json::object();
    for (const char* n : {"linf", "l2"}) {
        if (norm != "both" && norm != n) continue;
        auto r = kliepkit::lambda_sharp(s, parse_norm(n));
        ls[n] = {{"value", r.value},
                 {"nearest_point", vec_to_json(r.nearest_point)},
                 {"hull_weights", vec_to_json(r.hull_weights)}};
    }
    out["lambda_sharp"] = ls;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_fit(const SummaryInputs& in, const std::string& penalty, double lambda, double lambda1,
            double lambda2, kliepkit::SolveOptions opts, bool report_existence) {
    kliepkit::SufficientSummary s = load_summary(in);
    kliepkit::PenaltySpec pen;
    if (penalty == "none") pen = kliepkit::PenaltySpec::none();
    else if (penalty == "l1") pen = kliepkit::PenaltySpec::l1(lambda);
    else if (penalty == "l2") pen = kliepkit::PenaltySpec::l2(lambda);
    else pen = kliepkit::PenaltySpec::elastic_net(lambda1, lambda2);

    json out;
    if (report_existence) {
        kliepkit::ExistenceReport rep = kliepkit::existence_report(s, pen);
        out["existence"] = {{"verdict", kliepkit::to_string(rep.verdict)},
                            {"classification", kliepkit::to_string(rep.classification.kind)},
                            {"explanation", rep.explanation}};
        if (rep.lambda_sharp) out["existence"]["lambda_sharp"] = rep.lambda_sharp->value;
    }
    kliepkit::FitResult fit = kliepkit::fit_penalized(s, pen, opts);
    out["status"] = kliepkit::to_string(fit.status);
    out["objective"] = fit.objective;
    out["iterations"] = fit.iterations;
    out["residual"] = fit.residual;
    out["delta"] = vec_to_json(fit.delta_hat);
    if (fit.certificate) out["certificate"] = vec_to_json(*fit.certificate);
    std::cout << out.dump(2) << "\n";
    return 0;
}

std::vector<double> parse_number_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw kliepkit::ConfigError("bad number in list: '" + tok + "'");
        }
    }
    if (out.empty()) throw kliepkit::ConfigError("empty number list");
    return out;
}

int resolve_threads(int cli_threads) {
    if (const char* env = std::getenv("KLIEPKIT_THREADS")) {
        try {
            size_t used = 0;
            const int t = std::stoi(env, &used);
            if (used != std::string(env).size() || t < 1) throw std::invalid_argument(env);
            return t;
        } catch (const std::exception&) {
            throw kliepkit::ConfigError(std::string("KLIEPKIT_THREADS is not a positive integer: ") + env);
        }
    }
    return cli_threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"density-ratio hull diagnostics, penalized fits, and experiments"};
    app.require_subcommand(1);

    // diagnose
    SummaryInputs diag_in;
    std::string diag_norm = "both";
    double diag_tol = 1e-8;
    CLI::App* diagnose = app.add_subcommand("diagnose", "classify tbar_x against the hull and compute the critical level");
    add_summary_options(diagnose, diag_in);
    diagnose->add_option("--norm", diag_norm, "distance norm: linf | l2 | both")
        ->check(CLI::IsMember({"linf", "l2", "both"}));
    diagnose->add_option("--tol", diag_tol, "classification tolerance (default 1e-8)");

    // fit
    SummaryInputs fit_in;
    std::string fit_penalty = "none";
    double fit_lambda = 0.0, fit_lambda1 = 0.0, fit_lambda2 = 0.0;
    bool fit_existence = false;
    kliepkit::SolveOptions fit_opts;
    CLI::App* fit = app.add_subcommand("fit", "estimate the parameter difference");
    add_summary_options(fit, fit_in);
    fit->add_option("--penalty", fit_penalty, "none | l1 | l2 | elastic_net")
        ->check(CLI::IsMember({"none", "l1", "l2", "elastic_net"}));
    fit->add_option("--lambda", fit_lambda, "penalty level for l1 / l2");
    fit->add_option("--lambda1", fit_lambda1, "elastic net l1 level");
    fit->add_option("--lambda2", fit_lambda2, "elastic net squared-l2 level");
    fit->add_option("--max-iters", fit_opts.max_iters, "iteration cap (default 10000)");
    fit->add_option("--grad-tol", fit_opts.grad_tol, "stationarity tolerance (default 1e-8)");
    fit->add_flag("--existence", fit_existence, "include the existence report in the output");

    // toy
    std::string toy_points, toy_out = "toy.csv";
    double toy_tbar = 0.0, toy_min = -5.0, toy_max = 5.0, toy_step = 0.1;
    CLI::App* toy = app.add_subcommand("toy", "one-dimensional loss profile over a delta grid");
    toy->add_option("--points", toy_points, "denominator statistic values, comma separated")->required();
    toy->add_option("--tbar", toy_tbar, "numerator mean statistic")->required();
    toy->add_option("--grid-min", toy_min, "left end of the delta grid");
    toy->add_option("--grid-max", toy_max, "right end of the delta grid");
    toy->add_option("--grid-step", toy_step, "grid spacing (> 0)");
    toy->add_option("--out", toy_out, "output CSV path");

    // experiment
    std::string exp_config, exp_out = "experiment-out";
    int exp_threads = 0;
    CLI::App* experiment = app.add_subcommand("experiment", "run the replication grid from a JSON config");
    experiment->add_option("--config", exp_config, "JSON configuration path")->required();
    experiment->add_option("--out", exp_out, "output directory");
    experiment->add_option("--threads", exp_threads,
                           "worker threads (0 = auto; KLIEPKIT_THREADS overrides)");

    // plot
    std::string plot_records, plot_out = "summary.svg";
    CLI::App* plot = app.add_subcommand("plot", "render an SVG summary from records.csv");
    plot->add_option("--records", plot_records, "records.csv path")->required();
    plot->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*diagnose) return run_diagnose(diag_in, diag_norm, diag_tol);
        if (*fit)
            return run_fit(fit_in, fit_penalty, fit_lambda, fit_lambda1, fit_lambda2, fit_opts,
                           fit_existence);
        if (*toy) {
            if (!(toy_step > 0)) throw kliepkit::ConfigError("--grid-step must be positive");
            if (toy_max < toy_min) throw kliepkit::ConfigError("--grid-max must be >= --grid-min");
            std::vector<double> grid;
            for (double v = toy_min; v <= toy_max + 1e-12; v += toy_step) grid.push_back(v);
            kliepkit::toy_profile(parse_number_list(toy_points), toy_tbar, grid, toy_out);
            std::cerr << "wrote " << toy_out << "\n";
            return 0;
        }
        if (*experiment) {
            auto config = kliepkit::load_experiment_config_file(exp_config);
            kliepkit::run_experiment(config, exp_out, resolve_threads(exp_threads));
            std::cerr << "wrote " << exp_out << "/records.csv and summary.csv\n";
            return 0;
        }
        if (*plot) {
            auto records = kliepkit::parse_records_csv(plot_records);
            kliepkit::emit_summary_plot(records, plot_out);
            std::cerr << "wrote " << plot_out << "\n";
            return 0;
        }
    } catch (const kliepkit::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const kliepkit::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        if (!e.detail.empty()) std::cerr << "  " << e.detail << "\n";
        return 3;
    } catch (const kliepkit::NotPositiveDefinite& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const kliepkit::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const kliepkit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
