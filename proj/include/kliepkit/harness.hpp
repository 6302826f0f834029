#pragma once

// Experiment harness: configuration loading, the replication loop over the
// (m, sample-ratio, changed-edge-count) grid, record/summary CSV output,
// and the one-dimensional toy profile writer.
//
// Determinism contract: every replication derives its own random stream
// from (base_seed, stream_id) with stream_id fixed by the enumeration order
// of the grid, so records.csv is byte-identical across runs and thread
// counts.  The wall_ms column is always written as 0 for the same reason;
// measured timings live only in the returned records and the stderr
// summary.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "kliepkit/errors.hpp"
#include "kliepkit/geometry.hpp"
#include "kliepkit/losscore.hpp"
#include "kliepkit/simgen.hpp"
#include "kliepkit/statmodel.hpp"

namespace kliepkit {

struct ExperimentConfig {
    GraphSpec::Kind graph_kind = GraphSpec::Kind::Lattice;
    double edge_prob = 0.0;  // Erdos-Renyi only
    std::vector<int> m_list;
    std::vector<int> np_over_logm_list;  // n_p = round(ratio * log m)
    int n_q = 0;
    std::vector<int> d_list;
    double theta0 = 2.0;
    double theta1 = 0.4;
    double theta1_star = -0.4;
    int replications = 1;
    std::uint64_t base_seed = 1;
    PdPolicy pd_policy = PdPolicy::Strict;
    DualNorm dual_norm = DualNorm::Linf;
    EdgeCoeffMode edge_coeff_mode = EdgeCoeffMode::Half;
};

struct ReplicationRecord {
    int replication = 0;
    int m = 0, n_p = 0, n_q = 0, d = 0;
    double theta1_star = 0.0;
    double lambda_sharp = 0.0;
    double lambda_liu = 0.0;
    bool exceeds = false;
    std::string classification;  // RelInterior / RelBoundary / Outside / error:<kind>
    double pd_shift = 0.0;
    long long wall_ms = 0;

    bool ok() const { return classification.rfind("error:", 0) != 0; }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
T get_checked(const nlohmann::json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad or missing key '" + key + "': " + e.what());
    }
}

}  // namespace detail

inline ExperimentConfig load_experiment_config(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "graph", "edge_prob", "m_list", "np_over_logm_list", "n_q", "d_list",
        "theta0", "theta1", "theta1_star", "replications", "base_seed",
        "pd_policy", "dual_norm", "edge_coeff_mode"};
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("config: unknown key '" + it.key() + "'");

    ExperimentConfig c;
    const std::string graph = detail::get_checked<std::string>(j, "graph");
    if (graph == "lattice") c.graph_kind = GraphSpec::Kind::Lattice;
    else if (graph == "erdos_renyi") c.graph_kind = GraphSpec::Kind::ErdosRenyi;
    else throw ConfigError("config: graph must be 'lattice' or 'erdos_renyi'");

    if (c.graph_kind == GraphSpec::Kind::ErdosRenyi) {
        c.edge_prob = detail::get_checked<double>(j, "edge_prob");
        if (!(c.edge_prob > 0.0 && c.edge_prob < 1.0))
            throw ConfigError("config: edge_prob must lie in (0, 1)");
    } else if (j.contains("edge_prob")) {
        throw ConfigError("config: edge_prob only applies to erdos_renyi graphs");
    }

    c.m_list = detail::get_checked<std::vector<int>>(j, "m_list");
    c.np_over_logm_list = detail::get_checked<std::vector<int>>(j, "np_over_logm_list");
    c.n_q = detail::get_checked<int>(j, "n_q");
    c.d_list = detail::get_checked<std::vector<int>>(j, "d_list");
    c.theta0 = detail::get_checked<double>(j, "theta0");
    c.theta1 = detail::get_checked<double>(j, "theta1");
    c.theta1_star = detail::get_checked<double>(j, "theta1_star");
    c.replications = detail::get_checked<int>(j, "replications");
    c.base_seed = detail::get_checked<std::uint64_t>(j, "base_seed");

    if (j.contains("pd_policy")) {
        const auto s = detail::get_checked<std::string>(j, "pd_policy");
        if (s == "strict") c.pd_policy = PdPolicy::Strict;
        else if (s == "diagonal_repair") c.pd_policy = PdPolicy::DiagonalRepair;
        else throw ConfigError("config: pd_policy must be 'strict' or 'diagonal_repair'");
    }
    if (j.contains("dual_norm")) {
        const auto s = detail::get_checked<std::string>(j, "dual_norm");
        if (s == "linf") c.dual_norm = DualNorm::Linf;
        else if (s == "l2") c.dual_norm = DualNorm::L2;
        else throw ConfigError("config: dual_norm must be 'linf' or 'l2'");
    }
    if (j.contains("edge_coeff_mode")) {
        const auto s = detail::get_checked<std::string>(j, "edge_coeff_mode");
        if (s == "half") c.edge_coeff_mode = EdgeCoeffMode::Half;
        else if (s == "full") c.edge_coeff_mode = EdgeCoeffMode::Full;
        else throw ConfigError("config: edge_coeff_mode must be 'half' or 'full'");
    }

    if (c.m_list.empty() || c.np_over_logm_list.empty() || c.d_list.empty())
        throw ConfigError("config: m_list, np_over_logm_list and d_list must be nonempty");
    for (int m : c.m_list) {
        if (m < 2) throw ConfigError("config: every m must be >= 2");
        if (c.graph_kind == GraphSpec::Kind::Lattice) {
            const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
            if (s * s != m || s < 2)
                throw ConfigError("config: lattice sizes must be perfect squares >= 4");
        }
    }
    for (int r : c.np_over_logm_list)
        if (r < 1) throw ConfigError("config: sample-size ratios must be >= 1");
    for (int d : c.d_list)
        if (d < 0) throw ConfigError("config: changed-edge counts must be >= 0");
    if (c.n_q < 1) throw ConfigError("config: n_q must be >= 1");
    if (c.replications < 1) throw ConfigError("config: replications must be >= 1");
    return c;
}

inline ExperimentConfig load_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return load_experiment_config(j);
}

namespace detail {

inline ReplicationRecord run_one_replication(const ExperimentConfig& c, int m, int ratio, int d,
                                             int replication, std::uint64_t stream_id) {
    ReplicationRecord rec;
    rec.replication = replication;
    rec.m = m;
    rec.n_q = c.n_q;
    rec.d = d;
    rec.theta1_star = c.theta1_star;
    rec.n_p = std::max(1, static_cast<int>(std::lround(ratio * std::log(static_cast<double>(m)))));
    rec.lambda_liu = lambda_liu(m, rec.n_p);
    rec.lambda_sharp = std::numeric_limits<double>::quiet_NaN();
    rec.pd_shift = std::numeric_limits<double>::quiet_NaN();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        RngStream rng = RngStream::derive(c.base_seed, stream_id);
        // Stream order: graph seed, changed-edge pick, X sample, Y sample.
        GraphSpec gspec = (c.graph_kind == GraphSpec::Kind::Lattice)
                              ? GraphSpec::lattice(static_cast<int>(std::lround(std::sqrt(double(m)))))
                              : GraphSpec::erdos_renyi(m, c.edge_prob, rng.raw());
        auto edges = build_graph(gspec);
        PrecisionPair pair = build_precision_pair(m, edges, d, c.theta0, c.theta1, c.theta1_star,
                                                  c.pd_policy, rng, c.edge_coeff_mode);
        rec.pd_shift = pair.pd_shift;
        Eigen::MatrixXd X = sample_gaussian(pair.theta_p, rec.n_p, rng);
        Eigen::MatrixXd Y = sample_gaussian(pair.theta_q, c.n_q, rng);
        SufficientSummary summary = summarize(StatisticMap::gaussian_pairwise(m), X, Y);
        rec.classification = to_string(classify_hull(summary).kind);
        rec.lambda_sharp = lambda_sharp(summary, c.dual_norm).value;
        rec.exceeds = rec.lambda_sharp > rec.lambda_liu;
    } catch (const NotPositiveDefinite&) {
        rec.classification = "error:NotPositiveDefinite";
    } catch (const SolverError&) {
        rec.classification = "error:SolverError";
    } catch (const NumericalError&) {
        rec.classification = "error:NumericalError";
    } catch (const std::exception&) {
        rec.classification = "error:Unknown";
    }
    rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace detail

inline const char* records_csv_header() {
    return "replication,m,n_p,n_q,d,theta1_star,lambda_sharp,lambda_liu,exceeds,"
           "classification,pd_shift,wall_ms";
}

// Records as CSV.  Doubles use %.17g (round-trip exact, so the exceeds
// column is recomputable from the lambda columns); wall_ms is written as 0
// to keep same-seed outputs byte-identical.
inline void write_records_csv(const std::vector<ReplicationRecord>& records,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write records file: " + path);
    out << records_csv_header() << "\n";
    for (const auto& r : records) {
        out << r.replication << ',' << r.m << ',' << r.n_p << ',' << r.n_q << ',' << r.d << ','
            << detail::fmt_double(r.theta1_star) << ',' << detail::fmt_double(r.lambda_sharp)
            << ',' << detail::fmt_double(r.lambda_liu) << ',' << (r.exceeds ? "true" : "false")
            << ',' << r.classification << ',' << detail::fmt_double(r.pd_shift) << ",0\n";
    }
    if (!out) throw IoError("failed while writing records file: " + path);
}

inline std::vector<ReplicationRecord> parse_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open records file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != records_csv_header())
        throw IoError("records file has an unexpected header: " + path);
    std::vector<ReplicationRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 12) throw IoError("records file has a malformed row: " + line);
        ReplicationRecord r;
        r.replication = std::stoi(f[0]);
        r.m = std::stoi(f[1]);
        r.n_p = std::stoi(f[2]);
        r.n_q = std::stoi(f[3]);
        r.d = std::stoi(f[4]);
        r.theta1_star = std::stod(f[5]);
        r.lambda_sharp = std::stod(f[6]);
        r.lambda_liu = std::stod(f[7]);
        r.exceeds = (f[8] == "true");
        r.classification = f[9];
        r.pd_shift = std::stod(f[10]);
        r.wall_ms = std::stoll(f[11]);
        records.push_back(std::move(r));
    }
    return records;
}

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline void write_summary_csv(const std::vector<ReplicationRecord>& records,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write summary file: " + path);
    out << "m,n_p,n_q,d,theta1_star,replications,errors,median_lambda_sharp,"
           "mean_lambda_sharp,lambda_liu,exceed_rate\n";
    std::vector<std::tuple<int, int, int, double>> cells;  // (m, n_p, d, theta1_star)
    for (const auto& r : records) {
        std::tuple<int, int, int, double> key{r.m, r.n_p, r.d, r.theta1_star};
        if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
    }
    for (const auto& [m, np, d, t1s] : cells) {
        std::vector<double> vals;
        int errors = 0, total = 0, exceed = 0, nq = 0;
        double liu = 0;
        for (const auto& r : records) {
            if (r.m != m || r.n_p != np || r.d != d || r.theta1_star != t1s) continue;
            ++total;
            nq = r.n_q;
            liu = r.lambda_liu;
            if (!r.ok()) { ++errors; continue; }
            vals.push_back(r.lambda_sharp);
            exceed += r.exceeds ? 1 : 0;
        }
        const double mean =
            vals.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
        const double rate = vals.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : static_cast<double>(exceed) / vals.size();
        out << m << ',' << np << ',' << nq << ',' << d << ',' << fmt_double(t1s) << ',' << total
            << ',' << errors << ',' << fmt_double(median_of(vals)) << ',' << fmt_double(mean)
            << ',' << fmt_double(liu) << ',' << fmt_double(rate) << "\n";
    }
    if (!out) throw IoError("failed while writing summary file: " + path);
}

}  // namespace detail

// Full grid of replications.  threads <= 0 picks the hardware concurrency.
// Writes records.csv and summary.csv into out_dir and returns the records
// in deterministic grid order regardless of the thread count.
inline std::vector<ReplicationRecord> run_experiment(const ExperimentConfig& c,
                                                     const std::string& out_dir,
                                                     int threads = 0) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    struct Task {
        int m, ratio, d, replication;
        std::uint64_t stream_id;
    };
    std::vector<Task> tasks;
    std::uint64_t cell = 0;
    for (int m : c.m_list)
        for (int ratio : c.np_over_logm_list)
            for (int d : c.d_list) {
                for (int r = 0; r < c.replications; ++r)
                    tasks.push_back({m, ratio, d, r,
                                     cell * static_cast<std::uint64_t>(c.replications) +
                                         static_cast<std::uint64_t>(r)});
                ++cell;
            }

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));

    std::vector<ReplicationRecord> records(tasks.size());
    const auto t0 = std::chrono::steady_clock::now();
    if (threads == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) {
            const Task& t = tasks[i];
            records[i] = detail::run_one_replication(c, t.m, t.ratio, t.d, t.replication,
                                                     t.stream_id);
        }
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                const Task& t = tasks[i];
                records[i] = detail::run_one_replication(c, t.m, t.ratio, t.d, t.replication,
                                                         t.stream_id);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0).count();

    write_records_csv(records, (fs::path(out_dir) / "records.csv").string());
    detail::write_summary_csv(records, (fs::path(out_dir) / "summary.csv").string());

    int errors = 0;
    for (const auto& r : records) errors += r.ok() ? 0 : 1;
    std::fprintf(stderr, "[experiment] %zu replications in %lld ms (%d threads, %d failed)\n",
                 tasks.size(), static_cast<long long>(wall), threads, errors);
    return records;
}

// One-dimensional profile of the loss over a delta grid, written as CSV
// with the hull diagnosis in a leading comment line.  Returns the curve.
inline std::vector<std::pair<double, double>> toy_profile(const std::vector<double>& ty_points,
                                                          double tbar_x,
                                                          const std::vector<double>& delta_grid,
                                                          const std::string& out_path) {
    if (ty_points.empty()) throw EmptySampleError("toy_profile: no denominator points");
    if (delta_grid.empty()) throw std::invalid_argument("toy_profile: empty delta grid");
    Eigen::VectorXd tbar(1);
    tbar << tbar_x;
    Eigen::MatrixXd ty(ty_points.size(), 1);
    for (size_t j = 0; j < ty_points.size(); ++j) ty(j, 0) = ty_points[j];
    SufficientSummary s = make_summary(tbar, ty);

    const HullClassification cls = classify_hull(s);
    const double ls = lambda_sharp(s, DualNorm::Linf).value;

    std::vector<std::pair<double, double>> curve;
    curve.reserve(delta_grid.size());
    Eigen::VectorXd delta(1);
    for (double d : delta_grid) {
        delta[0] = d;
        curve.emplace_back(d, kliep_loss(s, delta));
    }

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write toy profile: " + out_path);
    out << "# classification=" << to_string(cls.kind) << " lambda_sharp=" << detail::fmt_double(ls)
        << "\n";
    out << "delta,loss\n";
    for (const auto& [d, l] : curve)
        out << detail::fmt_double(d) << ',' << detail::fmt_double(l) << "\n";
    if (!out) throw IoError("failed while writing toy profile: " + out_path);
    return curve;
}

}  // namespace kliepkit
