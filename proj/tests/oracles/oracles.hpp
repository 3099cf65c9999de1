#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the library's metric, split, aggregation or compositing code.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

std::optional<double> cc(const std::vector<double>& r, const std::vector<double>& a);
double rmse(const std::vector<double>& r, const std::vector<double>& a);
double mae(const std::vector<double>& r, const std::vector<double>& a);
std::optional<double> rrmse(const std::vector<double>& r, const std::vector<double>& a);

struct F1 {
    std::vector<std::optional<double>> per_class;
    std::optional<double> macro;
};
int argmax(const std::vector<double>& v);
F1 f1(const std::vector<int>& ref_labels, const std::vector<int>& pred_labels, int classes);

/// Exact minimizer of ||y - S a||^2 over the simplex, by enumerating every
/// support set and solving its equality-constrained problem.
Eigen::VectorXd simplex_least_squares(const Eigen::MatrixXd& S, const Eigen::VectorXd& y);

/// counts[cell][k] for a row-major fine label grid, -1 = no data.
std::vector<std::vector<std::int64_t>> block_counts(const std::vector<int>& labels, int width, int height,
                                                    int classes, int factor);

/// (year, month) from days since 1970-01-01.
std::pair<int, unsigned> civil_month(std::int64_t days);

/// Mean of values grouped by key.
std::map<std::pair<int, unsigned>, double> groupby_mean(const std::vector<std::pair<std::pair<int, unsigned>, double>>& rows);

}  // namespace oracle
