#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ampr {

/// Parameters of the synthetic linear model y = X beta0 + xi.
struct SyntheticSpec {
    int n_features = 1000;        ///< N
    double alpha = 0.5;           ///< M / N
    double rho0 = 0.2;            ///< fraction of nonzero signal components
    double noise_var = 0.01;      ///< variance of xi
    double r_com = 0.0;           ///< share of the common component, 0 for i.i.d.
    std::uint64_t seed = 0;

    int n_samples() const;  ///< M = round(alpha N)
    /// Throws ConfigError when any field is out of range.
    void validate() const;
};

/// Planted signal of a synthetic dataset.
struct Truth {
    Eigen::VectorXd beta0;
    std::vector<int> support;  ///< sorted indices with beta0 != 0
};

/// Affine map applied by standardize(); back-map coefficients with beta / scale.
struct Standardization {
    Eigen::VectorXd column_mean;
    Eigen::VectorXd column_scale;
    double response_mean = 0.0;
};

struct Dataset {
    Eigen::MatrixXd X;  ///< M x N, column major
    Eigen::VectorXd y;  ///< M
    std::optional<Truth> truth;
    std::vector<std::string> column_labels;
    std::vector<bool> noise_mask;  ///< true for injected noise columns
    std::optional<Standardization> standardization;

    int n_samples() const { return static_cast<int>(X.rows()); }
    int n_features() const { return static_cast<int>(X.cols()); }
    int n_noise() const;
    /// Throws DimensionError if the pieces disagree in size.
    void check_consistent() const;
};

/// X_{mu i} ~ N(0, 1/N); beta0 is round(rho0 N)-sparse with N(0, 1/rho0) entries.
Dataset gen_iid(const SyntheticSpec& spec);

/// Columns mix a shared vector and private vectors under per-entry Bernoulli(r_com) masks.
Dataset gen_correlated(const SyntheticSpec& spec);

/// gen_iid for r_com == 0, gen_correlated otherwise.
Dataset generate(const SyntheticSpec& spec);

/// Cosine overlap x_i.x_j / (|x_i| |x_j|).
double overlap(const Eigen::MatrixXd& X, int i, int j);

/**
 * Mean cosine overlap over ordered pairs i != j, computed exactly from
 * |sum_i x_i/|x_i||^2 in O(NM). Throws DomainError on a zero column.
 */
double mean_overlap(const Eigen::MatrixXd& X);

/**
 * Reads a numeric table with a header row. Delimiter is ';' or ',' (detected
 * from the header). The named column becomes y, the rest X in file order.
 * Throws IoError, ParseError (with 1-based row/column) or ConfigError for an
 * unknown response name.
 */
Dataset load_csv(const std::filesystem::path& path, const std::string& response_column);

/// Same as load_csv but from an in-memory string.
Dataset parse_csv(const std::string& text, const std::string& response_column);

/// Appends n_noise columns with N(0, 1/N_total) entries and flags them in noise_mask.
Dataset augment_noise(const Dataset& data, int n_noise, std::uint64_t seed);

/**
 * Centers every column and y, then scales columns to unit Euclidean norm.
 * Throws DomainError naming the first constant column.
 */
Dataset standardize(const Dataset& data);

/// Writes X and y as a CSV with a header (labels..., "y").
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace ampr
