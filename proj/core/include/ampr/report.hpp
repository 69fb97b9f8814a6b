#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ampr/selection.hpp"
#include "ampr/state_evolution.hpp"

namespace ampr {

// Long-format tables: one row per (lambda, column_label, quantity, value).
// Header line: lambda,column_label,quantity,value

void write_path_csv(std::ostream& out, const StabilityPath& path,
                    const std::vector<std::string>& labels);
void write_region_csv(std::ostream& out, const RejectionRegion& region);
void write_cv_csv(std::ostream& out, const CvResult& cv);

/// Per-feature table: label,beta_bar,w_var,pi
void write_moments_csv(std::ostream& out, const std::vector<std::string>& labels,
                       const Eigen::VectorXd& beta_bar, const Eigen::VectorXd& w_var,
                       const Eigen::VectorXd& pi);

/// t,chi_tilde,w_tilde,mse,A,C,v0,f1,f2
void write_se_csv(std::ostream& out, const std::vector<SeState>& trajectory);

/// Fields of the JSON run summary; absent optionals are omitted.
struct RunSummary {
    std::string command;
    std::optional<std::string> engine;
    std::optional<std::vector<std::string>> selected;
    std::optional<double> threshold;
    std::optional<double> lambda;
    std::optional<double> lambda_min;
    std::optional<double> lambda_opt;
    std::optional<double> tp;
    std::optional<double> fp;
    std::optional<bool> converged;
    std::optional<int> iterations;
    std::optional<double> normalized_mse_beta;
    std::optional<double> normalized_mse_w;
    std::optional<double> normalized_mse_pi;
    std::optional<double> mean_overlap;
    double wall_seconds = 0.0;
};

/// Pretty-printed JSON object.
std::string to_json(const RunSummary& summary);

/// Reads a per-feature moments table written by write_moments_csv.
struct MomentsTable {
    std::vector<std::string> labels;
    Eigen::VectorXd beta_bar;
    Eigen::VectorXd w_var;
    Eigen::VectorXd pi;
};
MomentsTable read_moments_csv(const std::filesystem::path& path);

}  // namespace ampr
