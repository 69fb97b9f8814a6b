#include "ampr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "ampr/errors.hpp"
#include "ampr/random.hpp"

namespace ampr {

namespace {

// Independent RNG streams used by the generators.
enum Stream : std::uint64_t {
    kDesign = 1,
    kSupport = 2,
    kSignal = 3,
    kNoise = 4,
    kCommon = 5,
    kMask = 6,
};

void fill_gaussian(Eigen::MatrixXd& m, double sd, CounterRng& rng) {
    std::normal_distribution<double> normal(0.0, sd);
    double* p = m.data();
    for (Eigen::Index k = 0; k < m.size(); ++k) p[k] = normal(rng);
}

std::vector<std::string> default_labels(int n) {
    std::vector<std::string> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = "x" + std::to_string(i + 1);
    return labels;
}

Truth planted_signal(const SyntheticSpec& spec) {
    const int n = spec.n_features;
    const int k0 = static_cast<int>(std::lround(spec.rho0 * n));
    Truth truth;
    truth.beta0 = Eigen::VectorXd::Zero(n);

    CounterRng pick(spec.seed, kSupport);
    std::vector<int> index(n);
    std::iota(index.begin(), index.end(), 0);
    for (int k = 0; k < k0; ++k) {
        std::uniform_int_distribution<int> u(k, n - 1);
        std::swap(index[k], index[u(pick)]);
    }
    truth.support.assign(index.begin(), index.begin() + k0);
    std::sort(truth.support.begin(), truth.support.end());

    CounterRng values(spec.seed, kSignal);
    std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / spec.rho0));
    for (int i : truth.support) {
        double v = normal(values);
        // beta0 != 0 defines the support
        while (v == 0.0) v = normal(values);
        truth.beta0[i] = v;
    }
    return truth;
}

Dataset assemble(Eigen::MatrixXd X, const SyntheticSpec& spec) {
    Dataset data;
    data.truth = planted_signal(spec);
    data.y = X * data.truth->beta0;
    if (spec.noise_var > 0.0) {
        CounterRng rng(spec.seed, kNoise);
        std::normal_distribution<double> normal(0.0, std::sqrt(spec.noise_var));
        for (Eigen::Index mu = 0; mu < data.y.size(); ++mu) data.y[mu] += normal(rng);
    }
    data.X = std::move(X);
    data.column_labels = default_labels(spec.n_features);
    data.noise_mask.assign(spec.n_features, false);
    return data;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

int SyntheticSpec::n_samples() const { return static_cast<int>(std::lround(alpha * n_features)); }

void SyntheticSpec::validate() const {
    if (n_features < 1) throw ConfigError("synthetic spec: N must be >= 1");
    if (!(alpha > 0.0) || n_samples() < 1) throw ConfigError("synthetic spec: alpha must give M >= 1");
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) throw ConfigError("synthetic spec: rho0 must lie in [0, 1]");
    if (!(noise_var >= 0.0)) throw ConfigError("synthetic spec: noise variance must be >= 0");
    if (!(r_com >= 0.0 && r_com < 1.0)) throw ConfigError("synthetic spec: r_com must lie in [0, 1)");
}

int Dataset::n_noise() const {
    return static_cast<int>(std::count(noise_mask.begin(), noise_mask.end(), true));
}

void Dataset::check_consistent() const {
    if (y.size() != X.rows()) throw DimensionError("dataset: y length differs from rows of X");
    if (static_cast<Eigen::Index>(column_labels.size()) != X.cols()) {
        throw DimensionError("dataset: label count differs from columns of X");
    }
    if (static_cast<Eigen::Index>(noise_mask.size()) != X.cols()) {
        throw DimensionError("dataset: noise mask length differs from columns of X");
    }
    if (truth && truth->beta0.size() != X.cols()) {
        throw DimensionError("dataset: beta0 length differs from columns of X");
    }
}

Dataset gen_iid(const SyntheticSpec& spec) {
    spec.validate();
    if (spec.r_com != 0.0) throw ConfigError("gen_iid requires r_com = 0");
    Eigen::MatrixXd X(spec.n_samples(), spec.n_features);
    CounterRng rng(spec.seed, kDesign);
    fill_gaussian(X, std::sqrt(1.0 / spec.n_features), rng);
    return assemble(std::move(X), spec);
}

Dataset gen_correlated(const SyntheticSpec& spec) {
    spec.validate();
    const int m = spec.n_samples();
    const int n = spec.n_features;
    const double sd = std::sqrt(1.0 / n);

    Eigen::MatrixXd common(m, 1);
    CounterRng common_rng(spec.seed, kCommon);
    fill_gaussian(common, sd, common_rng);

    Eigen::MatrixXd X(m, n);
    CounterRng design_rng(spec.seed, kDesign);
    fill_gaussian(X, sd, design_rng);

    CounterRng mask_rng(spec.seed, kMask);
    for (int i = 0; i < n; ++i) {
        for (int mu = 0; mu < m; ++mu) {
            if (uniform01(mask_rng) < spec.r_com) X(mu, i) = common(mu, 0);
        }
    }
    return assemble(std::move(X), spec);
}

Dataset generate(const SyntheticSpec& spec) {
    return spec.r_com == 0.0 ? gen_iid(spec) : gen_correlated(spec);
}

double overlap(const Eigen::MatrixXd& X, int i, int j) {
    const double ni = X.col(i).norm();
    const double nj = X.col(j).norm();
    if (ni == 0.0 || nj == 0.0) throw DomainError("overlap: zero column");
    return X.col(i).dot(X.col(j)) / (ni * nj);
}

double mean_overlap(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.cols();
    if (n < 2) throw DomainError("mean_overlap: need at least two columns");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = X.col(i).norm();
        if (norm == 0.0) {
            throw DomainError("mean_overlap: column " + std::to_string(i + 1) + " is zero");
        }
        sum += X.col(i) / norm;
    }
    const double nd = static_cast<double>(n);
    return (sum.squaredNorm() - nd) / (nd * (nd - 1.0));
}

Dataset parse_csv(const std::string& text, const std::string& response_column) {
    std::istringstream in(text);
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line) && trim(line).empty()) ++row;
    if (trim(line).empty()) throw ParseError("csv: missing header row", row, 1);

    const char delim = line.find(';') != std::string::npos ? ';' : ',';
    const auto header = split(line, delim);
    const auto response_it = std::find(header.begin(), header.end(), response_column);
    if (response_it == header.end()) {
        throw ConfigError("csv: response column '" + response_column + "' not found");
    }
    const auto response_index = static_cast<std::size_t>(response_it - header.begin());

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split(line, delim);
        if (cells.size() != header.size()) {
            throw ParseError("csv: row " + std::to_string(row) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(header.size()),
                             row, std::min(cells.size(), header.size()) + 1);
        }
        std::vector<double> values(cells.size());
        for (std::size_t col = 0; col < cells.size(); ++col) {
            const auto& cell = cells[col];
            const char* begin = cell.data();
            const char* end = begin + cell.size();
            auto [ptr, ec] = std::from_chars(begin, end, values[col]);
            if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(values[col])) {
                throw ParseError("csv: non-numeric cell '" + cell + "' at row " +
                                     std::to_string(row) + ", column " + std::to_string(col + 1),
                                 row, col + 1);
            }
        }
        rows.push_back(std::move(values));
    }

    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(header.size()) - 1;
    Dataset data;
    data.X.resize(m, n);
    data.y.resize(m);
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        Eigen::Index j = 0;
        for (std::size_t col = 0; col < header.size(); ++col) {
            if (col == response_index) {
                data.y[mu] = rows[mu][col];
            } else {
                data.X(mu, j++) = rows[mu][col];
            }
        }
    }
    for (std::size_t col = 0; col < header.size(); ++col) {
        if (col != response_index) data.column_labels.push_back(header[col]);
    }
    data.noise_mask.assign(n, false);
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), response_column);
}

Dataset augment_noise(const Dataset& data, int n_noise, std::uint64_t seed) {
    if (n_noise < 0) throw ConfigError("augment_noise: n_noise must be >= 0");
    data.check_consistent();
    if (n_noise == 0) return data;

    const Eigen::Index n0 = data.X.cols();
    const Eigen::Index total = n0 + n_noise;
    Dataset out = data;
    out.X.conservativeResize(Eigen::NoChange, total);
    Eigen::MatrixXd noise(data.X.rows(), n_noise);
    CounterRng rng(seed, kNoise);
    fill_gaussian(noise, std::sqrt(1.0 / static_cast<double>(total)), rng);
    out.X.rightCols(n_noise) = noise;
    for (int k = 0; k < n_noise; ++k) {
        out.column_labels.push_back("noise_" + std::to_string(k + 1));
        out.noise_mask.push_back(true);
    }
    if (out.truth) {
        out.truth->beta0.conservativeResize(total);
        out.truth->beta0.tail(n_noise).setZero();
    }
    return out;
}

Dataset standardize(const Dataset& data) {
    data.check_consistent();
    Dataset out = data;
    Standardization s;
    s.column_mean = out.X.colwise().mean().transpose();
    s.column_scale.resize(out.X.cols());
    for (Eigen::Index i = 0; i < out.X.cols(); ++i) {
        out.X.col(i).array() -= s.column_mean[i];
        const double norm = out.X.col(i).norm();
        if (!(norm > 0.0)) {
            throw DomainError("standardize: column '" + out.column_labels[i] + "' is constant");
        }
        out.X.col(i) /= norm;
        s.column_scale[i] = norm;
    }
    s.response_mean = out.y.size() > 0 ? out.y.mean() : 0.0;
    out.y.array() -= s.response_mean;
    out.standardization = std::move(s);
    return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    data.check_consistent();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    for (const auto& label : data.column_labels) out << label << ',';
    out << "y\n";
    for (Eigen::Index mu = 0; mu < data.X.rows(); ++mu) {
        for (Eigen::Index i = 0; i < data.X.cols(); ++i) out << data.X(mu, i) << ',';
        out << data.y[mu] << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ampr
