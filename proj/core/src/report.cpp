#include "ampr/report.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ampr/errors.hpp"

namespace ampr {

namespace {

constexpr const char* kLongHeader = "lambda,column_label,quantity,value\n";

class LongWriter {
public:
    explicit LongWriter(std::ostream& out) : out_(out) {
        out_.precision(17);
        out_ << kLongHeader;
    }
    void row(double lambda, const std::string& label, const char* quantity, double value) {
        out_ << lambda << ',' << label << ',' << quantity << ',' << value << '\n';
    }

private:
    std::ostream& out_;
};

}  // namespace

void write_path_csv(std::ostream& out, const StabilityPath& path,
                    const std::vector<std::string>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != path.pi.cols()) {
        throw DimensionError("write_path_csv: label count differs from path width");
    }
    LongWriter w(out);
    for (Eigen::Index k = 0; k < path.pi.rows(); ++k) {
        const double lam = path.lambdas[k];
        for (Eigen::Index i = 0; i < path.pi.cols(); ++i) {
            w.row(lam, labels[i], "pi", path.pi(k, i));
            w.row(lam, labels[i], "beta_bar", path.beta_bar(k, i));
            w.row(lam, labels[i], "w_var", path.w_var(k, i));
        }
        w.row(lam, "", "converged", path.converged[k] ? 1.0 : 0.0);
    }
}

void write_region_csv(std::ostream& out, const RejectionRegion& region) {
    LongWriter w(out);
    for (std::size_t k = 0; k < region.lambdas.size(); ++k) {
        w.row(region.lambdas[k], "noise", "median", region.median[k]);
        w.row(region.lambdas[k], "noise", "q_lo", region.lower[k]);
        w.row(region.lambdas[k], "noise", "q_hi", region.upper[k]);
    }
}

void write_cv_csv(std::ostream& out, const CvResult& cv) {
    LongWriter w(out);
    for (std::size_t k = 0; k < cv.lambdas.size(); ++k) {
        w.row(cv.lambdas[k], "", "cv_error", cv.mean_error[k]);
        w.row(cv.lambdas[k], "", "cv_se", cv.standard_error[k]);
    }
}

void write_moments_csv(std::ostream& out, const std::vector<std::string>& labels,
                       const Eigen::VectorXd& beta_bar, const Eigen::VectorXd& w_var,
                       const Eigen::VectorXd& pi) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (beta_bar.size() != n || w_var.size() != n || pi.size() != n) {
        throw DimensionError("write_moments_csv: column lengths differ");
    }
    out.precision(17);
    out << "label,beta_bar,w_var,pi\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        out << labels[i] << ',' << beta_bar[i] << ',' << w_var[i] << ',' << pi[i] << '\n';
    }
}

void write_se_csv(std::ostream& out, const std::vector<SeState>& trajectory) {
    out.precision(17);
    out << "t,chi_tilde,w_tilde,mse,A,C,v0,f1,f2\n";
    for (const auto& s : trajectory) {
        out << s.t << ',' << s.chi_tilde << ',' << s.w_tilde << ',' << s.mse << ',' << s.A << ','
            << s.C << ',' << s.v0 << ',' << s.f1 << ',' << s.f2 << '\n';
    }
}

std::string to_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["command"] = s.command;
    auto put = [&](const char* key, const auto& opt) {
        if (opt) j[key] = *opt;
    };
    put("engine", s.engine);
    put("selected", s.selected);
    put("threshold", s.threshold);
    put("lambda", s.lambda);
    put("lambda_min", s.lambda_min);
    put("lambda_opt", s.lambda_opt);
    put("tp", s.tp);
    put("fp", s.fp);
    put("converged", s.converged);
    put("iterations", s.iterations);
    put("normalized_mse_beta", s.normalized_mse_beta);
    put("normalized_mse_w", s.normalized_mse_w);
    put("normalized_mse_pi", s.normalized_mse_pi);
    put("mean_overlap", s.mean_overlap);
    j["wall_seconds"] = s.wall_seconds;
    return j.dump(2);
}

MomentsTable read_moments_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("label,beta_bar,w_var,pi", 0) != 0) {
        throw ParseError("moments table: unexpected header in " + path.string(), 1, 1);
    }
    MomentsTable t;
    std::vector<double> b, w, p;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string label, cb, cw, cp;
        if (!std::getline(cells, label, ',') || !std::getline(cells, cb, ',') ||
            !std::getline(cells, cw, ',') || !std::getline(cells, cp, ',')) {
            throw ParseError("moments table: short row in " + path.string(), row, 1);
        }
        try {
            b.push_back(std::stod(cb));
            w.push_back(std::stod(cw));
            p.push_back(std::stod(cp));
        } catch (const std::exception&) {
            throw ParseError("moments table: non-numeric cell in " + path.string(), row, 2);
        }
        t.labels.push_back(label);
    }
    t.beta_bar = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    t.w_var = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    t.pi = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    return t;
}

}  // namespace ampr
