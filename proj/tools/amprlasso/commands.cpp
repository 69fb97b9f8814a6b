#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ampr/ampr.hpp"

namespace amprlasso {

namespace fs = std::filesystem;
using namespace ampr;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- data input

struct SyntheticOptions {
    int n_features = 1000;
    double alpha = 0.5;
    double rho0 = 0.2;
    double noise_var = 0.01;
    double r_com = 0.0;
    std::uint64_t data_seed = 1;

    SyntheticSpec spec() const {
        SyntheticSpec s;
        s.n_features = n_features;
        s.alpha = alpha;
        s.rho0 = rho0;
        s.noise_var = noise_var;
        s.r_com = r_com;
        s.seed = data_seed;
        return s;
    }
};

struct DataOptions : SyntheticOptions {
    std::string csv;
    std::string response = "y";
    std::string truth;
    int noise_columns = 0;
    bool standardize = false;
    bool correlated = false;

    bool correlated_design() const { return correlated || (csv.empty() && r_com > 0.0); }
};

void add_synthetic_options(CLI::App* cmd, SyntheticOptions& o) {
    cmd->add_option("--n-features", o.n_features, "N of the synthetic design")->group("Synthetic data");
    cmd->add_option("--alpha", o.alpha, "M / N")->group("Synthetic data");
    cmd->add_option("--rho0", o.rho0, "fraction of nonzero signal entries")->group("Synthetic data");
    cmd->add_option("--noise-var", o.noise_var, "variance of the response noise")->group("Synthetic data");
    cmd->add_option("--r-com", o.r_com, "share of the common component (0 = i.i.d. design)")
        ->group("Synthetic data");
    cmd->add_option("--data-seed", o.data_seed, "seed of the synthetic dataset")->group("Synthetic data");
}

void add_data_options(CLI::App* cmd, DataOptions& o) {
    add_synthetic_options(cmd, o);
    cmd->add_option("--data", o.csv, "CSV table to load instead of generating data (relative paths "
                                     "are also looked up in the data directory)")
        ->group("Input data");
    cmd->add_option("--response", o.response, "response column of --data")->group("Input data");
    cmd->add_option("--truth", o.truth, "label,beta0 table of the planted signal for --data")->group("Input data");
    cmd->add_option("--noise-columns", o.noise_columns, "append this many Gaussian noise columns")
        ->check(CLI::NonNegativeNumber)
        ->group("Input data");
    cmd->add_flag("--standardize", o.standardize, "center columns and y, scale columns to unit norm")
        ->group("Input data");
    cmd->add_flag("--correlated", o.correlated, "treat the design as correlated (changes the default damping)")
        ->group("Input data");
}

fs::path resolve_input(const std::string& name) {
    const fs::path p(name);
    if (fs::exists(p) || p.is_absolute()) return p;
    const fs::path cached = fs::path(data_dir()) / p;
    return fs::exists(cached) ? cached : p;
}

Truth read_truth(const fs::path& path, const std::vector<std::string>& labels) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::map<std::string, double> values;
    std::string line;
    std::getline(in, line);
    if (line.rfind("label,beta0", 0) != 0) throw ParseError(path.string() + ": expected header label,beta0", 1, 1);
    for (std::size_t row = 2; std::getline(in, line); ++row) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path.string() + ": missing value", row, 2);
        try {
            values[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": bad number", row, 2);
        }
    }
    Truth truth;
    truth.beta0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = values.find(labels[i]);
        if (it == values.end()) throw DimensionError("truth table has no entry for column " + labels[i]);
        truth.beta0[static_cast<Eigen::Index>(i)] = it->second;
        if (it->second != 0.0) truth.support.push_back(static_cast<int>(i));
    }
    return truth;
}

Dataset load_data(const DataOptions& o, RunDir& run) {
    Dataset data;
    if (!o.csv.empty()) {
        const fs::path path = resolve_input(o.csv);
        data = load_csv(path, o.response);
        if (!o.truth.empty()) data.truth = read_truth(resolve_input(o.truth), data.column_labels);
        run.log("loaded " + path.string() + ": M=" + std::to_string(data.n_samples()) +
                " N=" + std::to_string(data.n_features()));
    } else {
        data = generate(o.spec());
        run.log("generated synthetic data: M=" + std::to_string(data.n_samples()) +
                " N=" + std::to_string(data.n_features()) + " r_com=" + num(o.r_com) +
                " seed=" + std::to_string(o.data_seed));
    }
    if (o.noise_columns > 0) {
        // a separate seed keeps the noise columns independent of the response noise
        data = augment_noise(data, o.noise_columns, o.data_seed + 1);
        run.log("appended " + std::to_string(o.noise_columns) + " noise columns");
    }
    if (o.standardize) {
        data = standardize(data);
        run.log("standardized columns and response");
    }
    return data;
}

std::vector<std::string> labels_of(const Dataset& data, const std::vector<int>& index) {
    std::vector<std::string> out;
    out.reserve(index.size());
    for (int i : index) out.push_back(data.column_labels[static_cast<std::size_t>(i)]);
    return out;
}

// ------------------------------------------------------------ engine options

struct PenaltyOptions {
    double lambda = 1.0;
    double w = 1.0;
    double p_w = 0.0;
    double tau = 1.0;

    PenaltyMixture mixture() const { return {lambda, w, p_w}; }
};

void add_penalty_options(CLI::App* cmd, PenaltyOptions& o) {
    cmd->add_option("--lambda", o.lambda, "regularization strength");
    cmd->add_option("--w", o.w, "randomized penalty factor in (0, 1]");
    cmd->add_option("--p-w", o.p_w, "probability of the penalty lambda / w");
    cmd->add_option("--tau", o.tau, "resampling rate (mean count per row)");
}

struct IterationOptions {
    std::optional<double> damping;
    int max_iters = 1000;
    double conv_tol = 1e-8;

    double resolved_damping(bool correlated) const {
        if (damping) return *damping;
        return correlated ? SelectionConfig::kCorrelatedDamping : 1.0;
    }
};

void add_iteration_options(CLI::App* cmd, IterationOptions& o) {
    cmd->add_option("--damping", o.damping,
                    "damping in (0, 1]; default 1, or 0.05 for correlated designs");
    cmd->add_option("--max-iters", o.max_iters, "AMPR sweep cap");
    cmd->add_option("--conv-tol", o.conv_tol, "AMPR convergence tolerance on the per-sweep change");
}

const std::vector<std::string> kCountModes{"fixed", "poisson", "identity"};

CountMode parse_count_mode(const std::string& name) {
    if (name == "poisson") return CountMode::Poisson;
    if (name == "identity") return CountMode::Identity;
    return CountMode::FixedSize;
}

struct LambdaGridOptions {
    std::vector<double> lambdas;
    int grid_points = 50;
    double min_ratio = 1e-3;

    std::vector<double> grid(const Dataset& data) const {
        if (!lambdas.empty()) return lambdas;
        return default_lambda_grid(data, grid_points, min_ratio);
    }
};

void add_grid_options(CLI::App* cmd, LambdaGridOptions& o) {
    cmd->add_option("--lambdas", o.lambdas, "explicit strictly decreasing lambda grid")->expected(1, -1);
    cmd->add_option("--grid-points", o.grid_points, "points of the default log-spaced grid");
    cmd->add_option("--min-ratio", o.min_ratio, "smallest / largest lambda of the default grid");
}

void write_moments(RunDir& run, const Dataset& data, const Eigen::VectorXd& beta_bar,
                   const Eigen::VectorXd& w_var, const Eigen::VectorXd& pi) {
    run.write("moments.csv",
              [&](std::ostream& out) { write_moments_csv(out, data.column_labels, beta_bar, w_var, pi); });
}

// ------------------------------------------------------------------ commands

int cmd_simulate(const Globals&, const SyntheticOptions& o, RunDir& run) {
    const auto spec = o.spec();
    const Dataset data = generate(spec);
    write_csv(data, run.path() / "data.csv");
    run.write("truth.csv", [&](std::ostream& out) {
        out.precision(17);
        out << "label,beta0\n";
        for (int i = 0; i < data.n_features(); ++i) out << data.column_labels[i] << ',' << data.truth->beta0[i] << '\n';
    });
    const double overlap = mean_overlap(data.X);
    nlohmann::json side;
    side["n_samples"] = data.n_samples();
    side["n_features"] = data.n_features();
    side["alpha"] = spec.alpha;
    side["rho0"] = spec.rho0;
    side["noise_var"] = spec.noise_var;
    side["r_com"] = spec.r_com;
    side["seed"] = spec.seed;
    side["support"] = labels_of(data, data.truth->support);
    side["mean_overlap"] = overlap;
    run.write_text("data.json", side.dump(2) + "\n");
    run.log("wrote data.csv, truth.csv, data.json; mean overlap " + num(overlap));

    RunSummary summary;
    summary.command = "simulate";
    summary.mean_overlap = overlap;
    run.finish(summary);
    return kExitOk;
}

struct AmprOptions {
    DataOptions data;
    PenaltyOptions penalty;
    IterationOptions iteration;
    std::optional<double> min_damping;
    bool deterministic = false;
};

int cmd_ampr(const Globals&, const AmprOptions& o, RunDir& run) {
    const Dataset data = load_data(o.data, run);
    AmprConfig config;
    config.tau = o.penalty.tau;
    config.penalty = o.penalty.mixture();
    config.damping = o.iteration.resolved_damping(o.data.correlated_design());
    config.max_iters = o.iteration.max_iters;
    config.conv_tol = o.iteration.conv_tol;
    config.counts = o.deterministic ? CountLaw::Deterministic : CountLaw::Poisson;
    run.log("AMPR lambda=" + num(config.penalty.lambda()) + " w=" + num(config.penalty.w()) +
            " p_w=" + num(config.penalty.p_w()) + " tau=" + num(config.tau) + " damping=" + num(config.damping) +
            (o.deterministic ? " deterministic counts" : ""));

    const AmprOutput out = o.min_damping ? run_with_damping_backoff(data, config, *o.min_damping)
                                         : AmprSolver(data, config).run();
    if (out.damping != config.damping) run.log("damping lowered to " + num(out.damping));
    write_moments(run, data, out.state.beta_bar, out.state.w_var, out.pi);
    run.write("residuals.csv", [&](std::ostream& s) {
        s.precision(17);
        s << "sweep,max_delta_beta_bar\n";
        for (std::size_t t = 0; t < out.residual_history.size(); ++t) s << t + 1 << ',' << out.residual_history[t] << '\n';
    });
    const auto m = macroscopics(out.state, data.truth ? &data.truth->beta0 : nullptr);
    run.log(std::string(out.converged ? "converged" : "NOT converged") + " after " +
            std::to_string(out.iters_used) + " sweeps; chi_tilde=" + num(m.chi_tilde) +
            " W_tilde=" + num(m.w_tilde) + (m.mse ? " mse=" + num(*m.mse) : ""));

    RunSummary summary;
    summary.command = "ampr";
    summary.engine = "ampr";
    summary.lambda = config.penalty.lambda();
    summary.converged = out.converged;
    summary.iterations = out.iters_used;
    run.finish(summary);
    return out.converged ? kExitOk : kExitNonConvergence;
}

struct ResampleOptions {
    DataOptions data;
    PenaltyOptions penalty;
    int n_res = 1000;
    std::string count_mode = "fixed";
    double lasso_tol = 1e-10;
};

int cmd_resample(const Globals& g, const ResampleOptions& o, RunDir& run) {
    const Dataset data = load_data(o.data, run);
    ResamplingConfig config;
    config.tau = o.penalty.tau;
    config.penalty = o.penalty.mixture();
    config.mode = parse_count_mode(o.count_mode);
    config.lasso.tol = o.lasso_tol;
    config.workers = g.workers;
    run.log("Monte-Carlo resampling n_res=" + std::to_string(o.n_res) + " mode=" + o.count_mode +
            " lambda=" + num(config.penalty.lambda()) + " seed=" + std::to_string(g.seed));
    const auto m = run_resampling(data, config, o.n_res, g.seed);
    write_moments(run, data, m.beta_bar, m.w_var, m.pi);

    RunSummary summary;
    summary.command = "resample";
    summary.engine = "monte-carlo";
    summary.lambda = config.penalty.lambda();
    run.finish(summary);
    return kExitOk;
}

struct SeOptions {
    SyntheticOptions synthetic;
    PenaltyOptions penalty;
    int steps = 20;
    int order = 41;
    bool deterministic = false;
    bool fixed_point = false;
    bool paired = false;
};

int cmd_se(const Globals&, const SeOptions& o, RunDir& run) {
    SeParams params;
    params.alpha = o.synthetic.alpha;
    params.noise_var = o.synthetic.noise_var;
    params.tau = o.penalty.tau;
    params.penalty = o.penalty.mixture();
    params.prior = SePrior::unit_power(o.synthetic.rho0);
    params.counts = o.deterministic ? CountLaw::Deterministic : CountLaw::Poisson;
    params.quadrature_order = o.order;

    RunSummary summary;
    summary.command = "se";
    summary.lambda = params.penalty.lambda();

    if (o.fixed_point) {
        params.validate();
        const auto fp = se_fixed_point(params, 1e-12, std::max(o.steps, 1));
        run.write("se.csv", [&](std::ostream& out) { write_se_csv(out, {fp.state}); });
        run.log(std::string(fp.converged ? "fixed point reached" : "fixed point NOT reached") + " after " +
                std::to_string(fp.iters) + " steps; mse=" + num(fp.state.mse));
        summary.converged = fp.converged;
        summary.iterations = fp.iters;
        run.finish(summary);
        return fp.converged ? kExitOk : kExitNonConvergence;
    }

    if (!o.paired) {
        const auto traj = se_run(se_initial(params), params, o.steps);
        run.write("se.csv", [&](std::ostream& out) { write_se_csv(out, traj); });
        run.log("state evolution: " + std::to_string(o.steps) + " steps, final mse=" + num(traj.back().mse));
        run.finish(summary);
        return kExitOk;
    }

    // Paired run: the SE with the empirical law of one planted signal next to
    // AMPR sweeps on that instance.
    const Dataset data = generate(o.synthetic.spec());
    const Eigen::VectorXd& beta0 = data.truth->beta0;
    params.prior = SePrior::empirical(beta0);
    const auto traj = se_run(se_initial(params, 0.0, 0.0, beta0.squaredNorm() / data.n_features()), params, o.steps);

    AmprConfig config;
    config.tau = params.tau;
    config.penalty = params.penalty;
    config.counts = params.counts;
    const AmprSolver solver(data, config);
    auto state = solver.init_state();
    run.write("se.csv", [&](std::ostream& out) { write_se_csv(out, traj); });
    run.write("tracking.csv", [&](std::ostream& out) {
        out.precision(17);
        out << "t,chi_tilde_se,chi_tilde_ampr,w_tilde_se,w_tilde_ampr,mse_se,mse_ampr\n";
        for (int t = 1; t <= o.steps; ++t) {
            solver.sweep(state);
            const auto m = macroscopics(state, &beta0);
            const auto& s = traj[static_cast<std::size_t>(t)];
            out << t << ',' << s.chi_tilde << ',' << m.chi_tilde << ',' << s.w_tilde << ',' << m.w_tilde << ','
                << s.mse << ',' << *m.mse << '\n';
        }
    });
    run.log("paired SE / AMPR trajectories over " + std::to_string(o.steps) + " sweeps at N=" +
            std::to_string(data.n_features()));
    run.finish(summary);
    return kExitOk;
}

struct SelectionOptions {
    DataOptions data;
    std::string engine = "ampr";
    IterationOptions iteration;
    int n_res = 1000;
    std::string count_mode = "fixed";
};

void add_selection_options(CLI::App* cmd, SelectionOptions& o) {
    add_data_options(cmd, o.data);
    cmd->add_option("--engine", o.engine, "ampr or mc (Monte-Carlo resampling)")
        ->check(CLI::IsMember({"ampr", "mc", "monte-carlo"}));
    add_iteration_options(cmd, o.iteration);
    cmd->add_option("--n-res", o.n_res, "Monte-Carlo resamples");
    cmd->add_option("--count-mode", o.count_mode, "Monte-Carlo counts: fixed, poisson or identity")
        ->check(CLI::IsMember(kCountModes));
}

SelectionConfig selection_config(SelectionConfig c, const Globals& g, const SelectionOptions& o,
                                 const PenaltyOptions& penalty) {
    c.tau = penalty.tau;
    c.w = penalty.w;
    c.p_w = penalty.p_w;
    c.engine = parse_engine(o.engine);
    c.damping = o.iteration.resolved_damping(o.data.correlated_design());
    c.max_iters = o.iteration.max_iters;
    c.conv_tol = o.iteration.conv_tol;
    c.n_res = o.n_res;
    c.seed = g.seed;
    c.count_mode = parse_count_mode(o.count_mode);
    c.workers = g.workers;
    return c;
}

struct BolassoOptions {
    SelectionOptions selection;
    PenaltyOptions penalty;
    bool lambda_given = false;
    double threshold = 0.9;
};

int cmd_bolasso(const Globals& g, const BolassoOptions& o, RunDir& run) {
    const Dataset data = load_data(o.selection.data, run);
    const auto config = selection_config(SelectionConfig::bolasso_defaults(), g, o.selection, o.penalty);
    const double lambda = o.lambda_given
                              ? o.penalty.lambda
                              : bolasso_lambda(double(data.n_samples()) / data.n_features());
    run.log("Bolasso engine=" + to_string(config.engine) + " lambda=" + num(lambda) +
            " threshold=" + num(o.threshold));
    const auto report = bolasso(data, lambda, o.threshold, config);
    run.write("pi.csv", [&](std::ostream& out) {
        out.precision(17);
        out << "label,pi,selected\n";
        for (int i = 0; i < data.n_features(); ++i) {
            out << data.column_labels[i] << ',' << report.pi[i] << ',' << (report.pi[i] >= o.threshold ? 1 : 0)
                << '\n';
        }
    });

    RunSummary summary;
    summary.command = "bolasso";
    summary.engine = to_string(config.engine);
    summary.selected = labels_of(data, report.support);
    summary.threshold = o.threshold;
    summary.lambda = lambda;
    if (report.rates) {
        summary.tp = report.rates->tp;
        summary.fp = report.rates->fp;
    }
    run.log("selected " + std::to_string(report.support.size()) + " columns");
    run.finish(summary);
    return kExitOk;
}

struct StabilityOptions {
    SelectionOptions selection;
    PenaltyOptions penalty;
    LambdaGridOptions grid;
    double q_lo = 16.0;
    double q_hi = 84.0;
};

int cmd_stability(const Globals& g, const StabilityOptions& o, RunDir& run) {
    const Dataset data = load_data(o.selection.data, run);
    const auto config = selection_config(SelectionConfig::stability_defaults(), g, o.selection, o.penalty);
    const auto lambdas = o.grid.grid(data);
    run.log("stability path engine=" + to_string(config.engine) + " over " + std::to_string(lambdas.size()) +
            " lambdas, damping=" + num(config.damping));
    const auto path = stability_path(data, lambdas, config);
    run.write("path.csv", [&](std::ostream& out) { write_path_csv(out, path, data.column_labels); });

    RunSummary summary;
    summary.command = "stability";
    summary.engine = to_string(config.engine);
    bool all = true;
    for (std::size_t k = 0; k < path.converged.size(); ++k) {
        if (!path.converged[k]) {
            all = false;
            run.log("lambda=" + num(path.lambdas[k]) + " did not converge");
        }
    }
    summary.converged = all;

    if (data.n_noise() > 0) {
        const auto region = rejection_region(path, data.noise_mask, o.q_lo, o.q_hi);
        run.write("region.csv", [&](std::ostream& out) { write_region_csv(out, region); });
        if (region.few_noise_columns) run.log("warning: fewer than 20 noise columns; the band is coarse");
        std::vector<int> exits;
        for (int i = 0; i < data.n_features(); ++i) {
            if (data.noise_mask[static_cast<std::size_t>(i)]) continue;
            for (std::size_t k = 0; k < lambdas.size(); ++k) {
                if (path.pi(static_cast<Eigen::Index>(k), i) > region.upper[k]) {
                    exits.push_back(i);
                    break;
                }
            }
        }
        summary.selected = labels_of(data, exits);
        run.log(std::to_string(exits.size()) + " columns exceed the noise band somewhere on the path");
    }
    run.finish(summary);
    return all ? kExitOk : kExitNonConvergence;
}

struct CvOptions {
    DataOptions data;
    LambdaGridOptions grid;
    int folds = 10;
    double lasso_tol = 1e-10;
};

int cmd_cv(const Globals& g, const CvOptions& o, RunDir& run) {
    const Dataset data = load_data(o.data, run);
    const auto lambdas = o.grid.grid(data);
    LassoOptions lasso;
    lasso.tol = o.lasso_tol;
    run.log(std::to_string(o.folds) + "-fold CV over " + std::to_string(lambdas.size()) + " lambdas");
    const auto cv = cross_validate(data, lambdas, o.folds, g.seed, lasso, g.workers);
    run.write("cv.csv", [&](std::ostream& out) { write_cv_csv(out, cv); });
    run.write("coefficients.csv", [&](std::ostream& out) {
        out.precision(17);
        out << "label,beta\n";
        for (int i = 0; i < data.n_features(); ++i) out << data.column_labels[i] << ',' << cv.beta_opt[i] << '\n';
    });

    RunSummary summary;
    summary.command = "cv";
    summary.lambda_min = cv.lambda_min;
    summary.lambda_opt = cv.lambda_opt;
    summary.selected = labels_of(data, cv.support_opt);
    if (data.truth) {
        const auto rates = tp_fp(cv.support_opt, data.truth->support, data.n_features());
        summary.tp = rates.tp;
        summary.fp = rates.fp;
    }
    run.log("lambda_min=" + num(cv.lambda_min) + " lambda_opt=" + num(cv.lambda_opt) + ", " +
            std::to_string(cv.support_opt.size()) + " columns at lambda_opt");
    run.finish(summary);
    return kExitOk;
}

struct CompareOptions {
    std::string reference;
    std::string candidate;
};

MomentsTable read_run(const std::string& where) {
    fs::path p(where);
    if (fs::is_directory(p)) p /= "moments.csv";
    return read_moments_csv(p);
}

int cmd_compare(const Globals&, const CompareOptions& o, RunDir& run) {
    const auto a = read_run(o.reference);
    const auto b = read_run(o.candidate);
    if (a.labels != b.labels) throw DimensionError("compare: the runs have different columns");

    RunSummary summary;
    summary.command = "compare";
    const auto metric = [&](const char* name, const Eigen::VectorXd& ref, const Eigen::VectorXd& cand,
                            std::optional<double>& slot) {
        if (!(ref.squaredNorm() > 0.0)) {
            slot = cand.squaredNorm() > 0.0 ? std::optional<double>{} : std::optional<double>{0.0};
            run.log(std::string(name) + ": reference is identically zero" +
                    (slot ? ", candidate too" : "; normalized MSE undefined"));
        } else {
            slot = normalized_mse(ref, cand);
        }
        if (slot) std::cout << name << ' ' << num(*slot) << '\n';
    };
    metric("normalized_mse_beta", a.beta_bar, b.beta_bar, summary.normalized_mse_beta);
    metric("normalized_mse_w", a.w_var, b.w_var, summary.normalized_mse_w);
    metric("normalized_mse_pi", a.pi, b.pi, summary.normalized_mse_pi);
    run.finish(summary);
    return kExitOk;
}

}  // namespace

std::string data_dir() {
    const char* dir = std::getenv("AMPR_DATA_DIR");
    return dir && *dir ? dir : "data";
}

void add_commands(CLI::App& app, Globals& g, Selected& selected) {
    const auto pick = [&selected](CLI::App* cmd, std::function<int(RunDir&)> run) {
        cmd->callback([&selected, cmd, run = std::move(run)] {
            selected.name = cmd->get_name();
            selected.run = run;
        });
    };

    {
        auto o = std::make_shared<SyntheticOptions>();
        auto* cmd = app.add_subcommand("simulate", "generate a synthetic dataset with its planted signal");
        add_synthetic_options(cmd, *o);
        pick(cmd, [&g, o](RunDir& run) { return cmd_simulate(g, *o, run); });
    }
    {
        auto o = std::make_shared<AmprOptions>();
        auto* cmd = app.add_subcommand("ampr", "message passing with resampling at one lambda");
        add_data_options(cmd, o->data);
        add_penalty_options(cmd, o->penalty);
        add_iteration_options(cmd, o->iteration);
        cmd->add_option("--min-damping", o->min_damping,
                        "halve the damping after a failed run, down to this floor");
        cmd->add_flag("--deterministic", o->deterministic, "counts fixed at 1 (plain AMP for the Lasso)");
        pick(cmd, [&g, o](RunDir& run) { return cmd_ampr(g, *o, run); });
    }
    {
        auto o = std::make_shared<ResampleOptions>();
        auto* cmd = app.add_subcommand("resample", "Monte-Carlo resampling with coordinate descent");
        add_data_options(cmd, o->data);
        add_penalty_options(cmd, o->penalty);
        cmd->add_option("--n-res", o->n_res, "number of resamples");
        cmd->add_option("--count-mode", o->count_mode, "fixed, poisson or identity")->check(CLI::IsMember(kCountModes));
        cmd->add_option("--lasso-tol", o->lasso_tol, "coordinate-descent tolerance");
        pick(cmd, [&g, o](RunDir& run) { return cmd_resample(g, *o, run); });
    }
    {
        auto o = std::make_shared<SeOptions>();
        auto* cmd = app.add_subcommand("se", "state evolution trajectory");
        add_synthetic_options(cmd, o->synthetic);
        add_penalty_options(cmd, o->penalty);
        cmd->add_option("--steps", o->steps, "number of steps (iteration cap with --fixed-point)");
        cmd->add_option("--quadrature-order", o->order, "Gauss-Hermite order");
        cmd->add_flag("--deterministic", o->deterministic, "counts fixed at 1");
        cmd->add_flag("--fixed-point", o->fixed_point, "iterate to the fixed point and write it");
        cmd->add_flag("--paired", o->paired, "also run AMPR on one synthetic instance (tracking.csv)");
        pick(cmd, [&g, o](RunDir& run) { return cmd_se(g, *o, run); });
    }
    {
        auto o = std::make_shared<BolassoOptions>();
        auto* cmd = app.add_subcommand("bolasso", "bootstrap Lasso selection");
        add_selection_options(cmd, o->selection);
        add_penalty_options(cmd, o->penalty);
        cmd->get_option("--lambda")->description("regularization strength (default sqrt(M/N) / 2)");
        cmd->add_option("--threshold", o->threshold, "selection threshold on pi");
        pick(cmd, [&g, o, cmd](RunDir& run) {
            o->lambda_given = cmd->count("--lambda") > 0;
            return cmd_bolasso(g, *o, run);
        });
    }
    {
        auto o = std::make_shared<StabilityOptions>();
        o->penalty.w = 0.5;
        o->penalty.p_w = 0.5;
        o->penalty.tau = 0.5;
        auto* cmd = app.add_subcommand("stability", "stability selection path and noise rejection band");
        add_selection_options(cmd, o->selection);
        cmd->add_option("--w", o->penalty.w, "randomized penalty factor in (0, 1]");
        cmd->add_option("--p-w", o->penalty.p_w, "probability of the penalty lambda / w");
        cmd->add_option("--tau", o->penalty.tau, "resampling rate");
        add_grid_options(cmd, o->grid);
        cmd->add_option("--q-lo", o->q_lo, "lower percentile of the noise band");
        cmd->add_option("--q-hi", o->q_hi, "upper percentile of the noise band");
        pick(cmd, [&g, o](RunDir& run) { return cmd_stability(g, *o, run); });
    }
    {
        auto o = std::make_shared<CvOptions>();
        auto* cmd = app.add_subcommand("cv", "k-fold cross-validation of the Lasso");
        add_data_options(cmd, o->data);
        add_grid_options(cmd, o->grid);
        cmd->add_option("--folds", o->folds, "number of folds");
        cmd->add_option("--lasso-tol", o->lasso_tol, "coordinate-descent tolerance");
        pick(cmd, [&g, o](RunDir& run) { return cmd_cv(g, *o, run); });
    }
    {
        auto o = std::make_shared<CompareOptions>();
        auto* cmd = app.add_subcommand("compare", "normalized MSE of a run's moments against a reference run");
        cmd->add_option("reference", o->reference, "reference run directory or moments.csv")->required();
        cmd->add_option("candidate", o->candidate, "candidate run directory or moments.csv")->required();
        pick(cmd, [&g, o](RunDir& run) { return cmd_compare(g, *o, run); });
    }
    {
        auto o = std::make_shared<FetchOptions>();
        o->url = "https://archive.ics.uci.edu/ml/machine-learning-databases/wine-quality/winequality-white.csv";
        auto* cmd = app.add_subcommand("fetch-wine", "download the white wine quality table into the data directory");
        cmd->add_option("--url", o->url, "source URL (http, https or file)");
        cmd->add_option("--dest", o->dest, "target directory (default $AMPR_DATA_DIR or ./data)");
        cmd->add_option("--sha256", o->sha256, "expected sha256 of the file");
        cmd->add_flag("--force", o->force, "download even when a verified copy exists");
        cmd->callback([&selected, &g, cmd, o] {
            selected.name = cmd->get_name();
            selected.run_plain = [&g, o] {
                if (o->dest.empty()) o->dest = data_dir();
                o->quiet = g.quiet;
                return fetch_wine(*o);
            };
        });
    }
}

}  // namespace amprlasso
