#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stunmix/data_model.hpp"

namespace stunmix::metrics {

// Per-class regression metrics over N (reference, predicted) pairs. Undefined
// results are std::nullopt and never coerced to a number.

/// Pearson correlation. Undefined for N < 2 or when either input is constant.
std::optional<double> cc(std::span<const double> r, std::span<const double> a);
double rmse(std::span<const double> r, std::span<const double> a);
double mae(std::span<const double> r, std::span<const double> a);
/// sqrt(sum (r - a)^2 / sum r^2). Undefined when every reference is zero.
std::optional<double> rrmse(std::span<const double> r, std::span<const double> a);

/// Index of the largest entry, ties resolved to the lowest index.
int argmax(const Vector& v);

struct F1Result {
    std::vector<std::optional<double>> per_class;
    std::optional<double> macro;
};

/// One-vs-rest F1 of the majority class. A class with TP = FP = FN = 0 is
/// undefined and left out of the macro average.
F1Result f1_majority(std::span<const AbundanceVector> refs, std::span<const AbundanceVector> preds);
/// Same, over K x N matrices (one column per sample).
F1Result f1_majority(const Matrix& refs, const Matrix& preds);

struct ClassMetrics {
    std::optional<double> cc;
    double rmse = 0.0;
    std::optional<double> rrmse;
    double mae = 0.0;
    std::optional<double> f1;
};

struct ClassMetricReport {
    std::vector<std::string> classes;
    std::vector<ClassMetrics> per_class;
    std::optional<double> macro_cc;
    double macro_rmse = 0.0;
    std::optional<double> macro_rrmse;
    double macro_mae = 0.0;
    std::optional<double> macro_f1;
    std::size_t samples = 0;
    std::vector<std::string> warnings;
};

/// Unweighted mean of the defined entries; nullopt when none is defined.
std::optional<double> macro_average(std::span<const std::optional<double>> values);

/// `refs` and `preds` are K x N.
ClassMetricReport compute_report(const Matrix& refs, const Matrix& preds, const std::vector<std::string>& classes);

/// Undefined values print as "NA".
std::string format_metric(const std::optional<double>& value);

/// `class,MAE,RMSE,RRMSE,CC,F1` with one row per class and a final `macro` row.
std::string format_report_csv(const ClassMetricReport& report);
/// Aligned plain-text table in the same column order.
std::string format_report_table(const ClassMetricReport& report);
/// `class,ref,pred` for every sample and class.
std::string format_scatter_csv(const Matrix& refs, const Matrix& preds, const std::vector<std::string>& classes);

}  // namespace stunmix::metrics
