#include "ginibre/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ginibre/analytic.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/simulator.hpp"

namespace ginibre::cli {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Row {
    double theta_db = 0.0;
    double theta = 0.0;
    double coverage = 0.0;
    std::optional<double> std_error;
    int m = 1;
    double beta = 2.0;
    Method method = Method::analytic;
    std::optional<std::size_t> n_samples;
    std::optional<std::uint64_t> seed;
};

struct CommonOptions {
    double rel_tol = NumericsPolicy{}.rel_tol;
    double abs_tol = NumericsPolicy{}.abs_tol;
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string format = "csv";
    std::string config;

    NumericsPolicy policy() const {
        NumericsPolicy p;
        p.rel_tol = rel_tol;
        p.abs_tol = abs_tol;
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return p;
    }
};

struct CoverageOptions {
    std::vector<int> ms{1};
    std::vector<double> betas{2.0};
    std::string theta_db = "-10:20:1";
    std::vector<std::string> methods{"analytic"};
    std::string model = "gpp";
    std::size_t samples = 100000;
    int points = 512;
};

struct AsymptOptions {
    std::vector<double> betas;
    std::size_t samples = 1000;
};

struct ValidateOptions {
    std::size_t samples = 20000;
};

void add_common(CLI::App* cmd, CommonOptions& c, bool with_output) {
    cmd->add_option("--rel-tol", c.rel_tol, "Relative tolerance of the numerical engine")->capture_default_str();
    cmd->add_option("--abs-tol", c.abs_tol, "Absolute tolerance of the numerical engine")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Root seed of every random stream")->capture_default_str();
    if (with_output) {
        cmd->add_option("--out", c.out, "Output file (default: standard output)");
        cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    }
    cmd->add_option("--config", c.config, "Flat key=value file; command-line flags take precedence");
}

// Fills options that were not given on the command line from a flat
// key=value file. Keys are long option names without the dashes.
void apply_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::FileError& e) {
        throw UsageError(e.what());
    }
    for (const auto& item : items) {
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "default"))
            throw UsageError("config sections are not supported: " + item.fullname());
        if (item.name == "config") throw UsageError("config files cannot include other config files");
        CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
        if (opt == nullptr) throw UsageError("unknown config key '" + item.name + "' in " + path);
        if (opt->count() > 0) continue;
        try {
            opt->add_result(item.inputs);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("config key '" + item.name + "': " + e.what());
        }
    }
}

std::string_view text_of(const std::optional<double>& v, std::string& buf) {
    buf = v ? format_number(*v) : std::string();
    return buf;
}

void write_csv(const std::vector<Row>& rows, std::ostream& os) {
    os << "theta_db,theta,coverage,stderr,m,beta,method,n_samples,seed\n";
    std::string buf;
    for (const auto& r : rows) {
        os << format_number(r.theta_db) << ',' << format_number(r.theta) << ',' << format_number(r.coverage) << ','
           << text_of(r.std_error, buf) << ',' << r.m << ',' << format_number(r.beta) << ',' << to_string(r.method)
           << ',' << (r.n_samples ? std::to_string(*r.n_samples) : "") << ','
           << (r.seed ? std::to_string(*r.seed) : "") << '\n';
    }
}

void write_json(const std::vector<Row>& rows, std::ostream& os) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json o;
        o["theta_db"] = r.theta_db;
        o["theta"] = r.theta;
        o["coverage"] = r.coverage;
        o["stderr"] = r.std_error ? nlohmann::ordered_json(*r.std_error) : nlohmann::ordered_json(nullptr);
        o["m"] = r.m;
        o["beta"] = r.beta;
        o["method"] = std::string(to_string(r.method));
        o["n_samples"] = r.n_samples ? nlohmann::ordered_json(*r.n_samples) : nlohmann::ordered_json(nullptr);
        o["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(o));
    }
    os << arr.dump(2) << '\n';
}

// Writes the rendered table to the target. Nothing is created before the
// content is complete; a failed write removes the file.
void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (f) f << content;
    if (!f) {
        f.close();
        std::remove(path.c_str());
        throw std::runtime_error("cannot write " + path);
    }
}

std::vector<Row> run_coverage(const CoverageOptions& o, const CommonOptions& c) {
    ThetaGrid grid;
    try {
        grid = parse_theta_grid(o.theta_db);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto dbs = grid.values_db();
    std::vector<double> thetas;
    for (double db : dbs) thetas.push_back(db_to_linear(db));
    if (o.ms.empty() || o.betas.empty() || o.methods.empty()) throw UsageError("m, beta and method lists must not be empty");
    std::vector<Method> methods;
    try {
        for (const auto& name : o.methods) methods.push_back(parse_method(name));
        for (int m : o.ms)
            for (double b : o.betas) ModelParams{m, b, 1.0}.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    const NumericsPolicy policy = c.policy();
    const PointModel model = o.model == "ppp" ? PointModel::ppp : PointModel::gpp;
    AnalyticOptions aopt;
    for (int m : o.ms)
        if (m > aopt.max_m && std::find(methods.begin(), methods.end(), Method::analytic) != methods.end())
            throw UsageError("analytic method supports m <= " + std::to_string(aopt.max_m));
    if (std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::analytic; })) {
        if (o.samples < 100) throw UsageError("--samples must be >= 100");
        if (o.points < 16) throw UsageError("--points must be >= 16");
    }

    std::vector<Row> rows;
    for (Method method : methods) {
        if (method == Method::analytic) {
            struct Cell {
                int m;
                double beta;
                std::size_t ti;
            };
            std::vector<Cell> cells;
            for (int m : o.ms)
                for (double b : o.betas)
                    for (std::size_t ti = 0; ti < thetas.size(); ++ti) cells.push_back({m, b, ti});
            std::vector<CoverageEstimate> est(cells.size());
            parallel_for(cells.size(), [&](std::size_t j) {
                est[j] = coverage_analytic(ModelParams{cells[j].m, cells[j].beta, thetas[cells[j].ti]}, policy, aopt);
            });
            for (std::size_t j = 0; j < cells.size(); ++j)
                rows.push_back({dbs[cells[j].ti], thetas[cells[j].ti], est[j].value, std::nullopt, cells[j].m,
                                cells[j].beta, method, std::nullopt, std::nullopt});
            continue;
        }
        for (double b : o.betas) {
            McSpec spec;
            spec.model = model;
            spec.beta = b;
            spec.ms = o.ms;
            spec.thetas = thetas;
            spec.estimator = method;
            spec.n = o.samples;
            spec.n_points = o.points;
            spec.seed = c.seed;
            const auto est = coverage_mc_grid(spec);
            for (std::size_t mi = 0; mi < o.ms.size(); ++mi)
                for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
                    const auto& e = est[mi * thetas.size() + ti];
                    rows.push_back({dbs[ti], thetas[ti], e.value, e.std_error, o.ms[mi], b, method, e.n, c.seed});
                }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::make_tuple(to_string(a.method), a.m, a.beta, a.theta_db) <
               std::make_tuple(to_string(b.method), b.m, b.beta, b.theta_db);
    });
    return rows;
}

std::string render_asympt(const std::vector<GammaBoundReport>& reps, std::size_t samples, std::uint64_t seed,
                          const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : reps) {
            nlohmann::ordered_json o;
            o["beta"] = r.beta;
            o["c1"] = r.c1;
            o["cinf"] = r.cinf.value;
            o["cinf_stderr"] = r.cinf.std_error;
            o["gamma_factor"] = r.gamma_factor;
            o["bound_holds"] = r.holds;
            o["n_samples"] = samples;
            o["seed"] = seed;
            arr.push_back(std::move(o));
        }
        os << arr.dump(2) << '\n';
        return os.str();
    }
    os << "beta,c1,cinf,cinf_stderr,gamma_factor,bound_holds,n_samples,seed\n";
    for (const auto& r : reps)
        os << format_number(r.beta) << ',' << format_number(r.c1) << ',' << format_number(r.cinf.value) << ','
           << format_number(r.cinf.std_error) << ',' << format_number(r.gamma_factor) << ','
           << (r.holds ? "true" : "false") << ',' << samples << ',' << seed << '\n';
    return os.str();
}

struct CheckLine {
    std::string name;
    bool pass = false;
    double discrepancy = 0.0;
    double limit = 0.0;
    std::string note;
};

int run_validate(const ValidateOptions& o, const CommonOptions& c, std::ostream& out) {
    const NumericsPolicy policy = c.policy();
    if (o.samples < 100) throw UsageError("--samples must be >= 100");
    std::vector<CheckLine> lines;
    double worst_error = 0.0;
    bool range_ok = true;
    std::string analytic_note;

    for (int m : {2, 3}) {
        CheckLine line{"example_m" + std::to_string(m), true, 0.0, 1e-9, ""};
        for (double beta : {1.25, 2.0})
            for (double db : {-5.0, 5.0, 15.0}) {
                try {
                    AnalyticOptions aopt;
                    aopt.verify = true;
                    const auto rep = coverage_analytic_report(ModelParams{m, beta, db_to_linear(db)}, policy, aopt);
                    const double v = rep.estimate.value;
                    const double d = std::abs(rep.example_value - v) / std::max(std::abs(v), 1e-300);
                    line.discrepancy = std::max(line.discrepancy, d);
                    worst_error = std::max(worst_error, rep.estimate.error_estimate);
                    const double eps = rep.estimate.error_estimate;
                    if (v < -10.0 * eps || v > 1.0 + 10.0 * eps) range_ok = false;
                } catch (const std::exception& e) {
                    line.pass = false;
                    line.note = e.what();
                    analytic_note = e.what();
                }
            }
        if (line.discrepancy > line.limit) line.pass = false;
        lines.push_back(line);
    }
    CheckLine err_line{"analytic_error_estimate", true, worst_error, 1e-5, analytic_note};
    if (worst_error > err_line.limit || !range_ok || !analytic_note.empty()) err_line.pass = false;
    if (!range_ok) err_line.note = "value outside [0, 1] beyond its error estimate";
    lines.push_back(err_line);

    const ModelParams p{1, 2.0, 1.0};
    const Method ms[3] = {Method::mc_raw, Method::mc_serving_marg, Method::mc_full_marg};
    CoverageEstimate est[3];
    for (int j = 0; j < 3; ++j) est[j] = coverage_mc(PointModel::gpp, p, ms[j], o.samples, 512, c.seed);
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const double se = std::hypot(est[a].std_error, est[b].std_error);
            const double d = std::abs(est[a].value - est[b].value);
            CheckLine line{std::string(to_string(ms[a])) + "_vs_" + std::string(to_string(ms[b])), d <= 3.0 * se, d,
                           3.0 * se, ""};
            lines.push_back(line);
        }

    std::size_t passed = 0;
    for (const auto& l : lines) {
        out << (l.pass ? "PASS " : "FAIL ") << l.name << " max_discrepancy=" << format_number(l.discrepancy)
            << " limit=" << format_number(l.limit);
        if (!l.note.empty()) out << " (" << l.note << ")";
        out << '\n';
        if (l.pass) ++passed;
    }
    out << "validate: " << passed << '/' << lines.size() << " checks passed\n";
    return passed == lines.size() ? kOk : kNumerical;
}

}  // namespace

std::vector<double> ThetaGrid::values_db() const {
    std::vector<double> v;
    const double span = (stop - start) / step;
    const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
    for (long long k = 0; k < count; ++k) {
        const double db = start + static_cast<double>(k) * step;
        // Snap to 12 significant digits so 0.1-style steps print cleanly.
        v.push_back(std::stod(format_number(db)));
    }
    return v;
}

ThetaGrid parse_theta_grid(std::string_view text) {
    ThetaGrid g;
    double vals[3];
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t end = k < 2 ? text.find(':', pos) : text.size();
        if (end == std::string_view::npos) throw std::invalid_argument("theta grid must look like START:STOP:STEP");
        const auto piece = text.substr(pos, end - pos);
        const auto* first = piece.data();
        const auto* last = piece.data() + piece.size();
        if (!piece.empty() && *first == '+') ++first;
        const auto res = std::from_chars(first, last, vals[k]);
        if (piece.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(vals[k]))
            throw std::invalid_argument("bad number '" + std::string(piece) + "' in theta grid");
        pos = end + 1;
    }
    g.start = vals[0];
    g.stop = vals[1];
    g.step = vals[2];
    if (!(g.step > 0.0)) throw std::invalid_argument("theta grid step must be > 0");
    if (g.start > g.stop) throw std::invalid_argument("theta grid start must not exceed stop");
    if ((g.stop - g.start) / g.step > 1e6) throw std::invalid_argument("theta grid has too many points");
    return g;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    std::string s(buf, res.ptr);
    if (s == "-0") s = "0";
    return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coverage probability of cellular networks with Ginibre-deployed base stations"};
    app.require_subcommand(1);

    CommonOptions cov_common;
    CoverageOptions cov;
    auto* cmd_cov = app.add_subcommand("coverage", "Coverage probability over a threshold grid");
    cmd_cov->add_option("--m", cov.ms, "Nakagami shapes (comma-separated)")->delimiter(',')->capture_default_str();
    cmd_cov->add_option("--beta", cov.betas, "Path-loss parameters beta > 1 (comma-separated)")
        ->delimiter(',')
        ->capture_default_str();
    cmd_cov->add_option("--theta-db", cov.theta_db, "Threshold grid START:STOP:STEP in dB")->capture_default_str();
    cmd_cov->add_option("--method", cov.methods, "analytic, mc_raw, mc_serving_marg, mc_full_marg (comma-separated)")
        ->delimiter(',')
        ->capture_default_str();
    cmd_cov->add_option("--model", cov.model, "Point process for Monte Carlo methods")
        ->check(CLI::IsMember({"gpp", "ppp"}))
        ->capture_default_str();
    cmd_cov->add_option("--samples", cov.samples, "Monte Carlo replications")->capture_default_str();
    cmd_cov->add_option("--points", cov.points, "Base stations sampled per replication")->capture_default_str();
    add_common(cmd_cov, cov_common, true);

    CommonOptions asy_common;
    AsymptOptions asy;
    auto* cmd_asy = app.add_subcommand("asympt", "Large-threshold constants c1, cinf and the Gamma-factor bound");
    cmd_asy->add_option("--beta", asy.betas, "Path-loss parameters beta > 1 (comma-separated)")
        ->delimiter(',');
    cmd_asy->add_option("--samples", asy.samples, "Monte Carlo samples for cinf")->capture_default_str();
    add_common(cmd_asy, asy_common, true);

    CommonOptions val_common;
    ValidateOptions val;
    auto* cmd_val = app.add_subcommand("validate", "Regression and estimator-consistency checks");
    cmd_val->add_option("--samples", val.samples, "Monte Carlo replications per estimator")->capture_default_str();
    add_common(cmd_val, val_common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        apply_config(cmd_cov->parsed() ? cmd_cov : cmd_asy->parsed() ? cmd_asy : cmd_val,
                     cmd_cov->parsed() ? cov_common.config : cmd_asy->parsed() ? asy_common.config : val_common.config);
        if (cmd_cov->parsed()) {
            const auto rows = run_coverage(cov, cov_common);
            std::ostringstream os;
            if (cov_common.format == "json")
                write_json(rows, os);
            else
                write_csv(rows, os);
            emit(os.str(), cov_common.out, out);
            return kOk;
        }
        if (cmd_asy->parsed()) {
            if (asy.betas.empty()) throw UsageError("--beta needs at least one value");
            for (double b : asy.betas)
                if (!(b > 1.0) || !std::isfinite(b)) throw UsageError("beta must be > 1");
            if (asy.samples < 2) throw UsageError("--samples must be >= 2");
            const NumericsPolicy policy = asy_common.policy();
            std::vector<GammaBoundReport> reps;
            for (double b : asy.betas) reps.push_back(gamma_bound_check(b, policy, asy.samples, asy_common.seed));
            emit(render_asympt(reps, asy.samples, asy_common.seed, asy_common.format), asy_common.out, out);
            return kOk;
        }
        return run_validate(val, val_common, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace ginibre::cli
