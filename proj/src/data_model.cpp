#include "stunmix/data_model.hpp"

#include <cmath>
#include <sstream>

#include "stunmix/error.hpp"

namespace stunmix {

namespace {

void check_series_shape(const SpectralSeries& s) {
    if (s.mask.rows() != s.values.rows() || s.mask.cols() != s.values.cols() ||
        s.deltas.rows() != s.values.rows() || s.deltas.cols() != s.values.cols() ||
        static_cast<Eigen::Index>(s.timestamps.size()) != s.values.rows()) {
        fail(ErrorKind::ShapeMismatch, "series matrices and timestamps disagree in shape");
    }
}

}  // namespace

Dataset::Dataset(std::vector<Sample> samples, std::vector<std::string> legend,
                 std::optional<NormStats> norm_stats)
    : samples_(std::move(samples)), legend_(std::move(legend)), norm_stats_(std::move(norm_stats)) {
    if (samples_.empty()) return;
    steps_ = samples_.front().series.steps();
    bands_ = samples_.front().series.bands();
    const int k = static_cast<int>(legend_.size());
    for (const auto& s : samples_) {
        check_series_shape(s.series);
        if (s.series.steps() != steps_ || s.series.bands() != bands_) {
            fail(ErrorKind::ShapeMismatch, "sample " + s.pixel_id + " has a different T x B shape");
        }
        if (s.reference.classes() != k) {
            fail(ErrorKind::ShapeMismatch,
                 "sample " + s.pixel_id + " has " + std::to_string(s.reference.classes()) +
                     " abundances but the legend has " + std::to_string(k) + " classes");
        }
    }
}

ClassLegend ClassLegend::level1() {
    return {1, {"Artificial", "Agricultural lands", "Terrestrial lands", "Wetlands"}};
}

ClassLegend ClassLegend::level2() {
    return {2,
            {"Artificial", "Annual croplands", "Greenhouses", "Woody croplands",
             "Combinations of croplands and vegetation", "Grasslands and grasslands with trees",
             "Shrublands and shrublands with trees", "Forests", "Barelands", "Wetlands"}};
}

ClassLegend ClassLegend::for_classes(int k) {
    if (k == 4) return level1();
    if (k == 10) return level2();
    ClassLegend legend{0, {}};
    for (int i = 0; i < k; ++i) legend.names.push_back("class_" + std::to_string(i + 1));
    return legend;
}

void validate_abundance(std::span<const double> values, double tol) {
    if (values.empty()) fail(ErrorKind::SimplexViolation, "empty abundance vector");
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "abundance is not finite");
        if (v < 0.0) {
            std::ostringstream os;
            os << "negative abundance " << v;
            fail(ErrorKind::SimplexViolation, os.str());
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "abundances sum to " << sum;
        fail(ErrorKind::SimplexViolation, os.str());
    }
}

void validate_abundance(const Vector& values, double tol) {
    validate_abundance(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), tol);
}

Matrix compute_deltas(const Matrix& mask, std::span<const double> timestamps) {
    if (static_cast<Eigen::Index>(timestamps.size()) != mask.rows()) {
        fail(ErrorKind::ShapeMismatch, "timestamps length differs from the number of mask rows");
    }
    Matrix deltas = Matrix::Zero(mask.rows(), mask.cols());
    for (Eigen::Index t = 1; t < mask.rows(); ++t) {
        const double gap = timestamps[t] - timestamps[t - 1];
        for (Eigen::Index b = 0; b < mask.cols(); ++b) {
            deltas(t, b) = mask(t - 1, b) == 1.0 ? gap : deltas(t - 1, b) + gap;
        }
    }
    return deltas;
}

Sample make_sample(const Matrix& values, const Matrix& mask, std::vector<double> timestamps,
                   const AncillaryVector& ancillary, const Vector& reference, int grid_x, int grid_y,
                   std::string pixel_id) {
    if (values.rows() != mask.rows() || values.cols() != mask.cols()) {
        fail(ErrorKind::ShapeMismatch, "values and mask differ in shape");
    }
    if (values.rows() < 1 || values.cols() < 1) fail(ErrorKind::ShapeMismatch, "empty series");
    if (static_cast<Eigen::Index>(timestamps.size()) != values.rows()) {
        fail(ErrorKind::ShapeMismatch, "timestamps length differs from the number of time steps");
    }
    for (std::size_t t = 1; t < timestamps.size(); ++t) {
        if (!(timestamps[t] > timestamps[t - 1])) {
            fail(ErrorKind::InvalidArgument, "timestamps must be strictly increasing");
        }
    }
    if (grid_x < 0 || grid_y < 0) fail(ErrorKind::InvalidArgument, "grid coordinates must be nonnegative");

    Sample s;
    s.pixel_id = std::move(pixel_id);
    s.grid_x = grid_x;
    s.grid_y = grid_y;
    s.series.values = values;
    s.series.mask = mask;
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        for (Eigen::Index b = 0; b < values.cols(); ++b) {
            const double m = mask(t, b);
            if (m != 0.0 && m != 1.0) fail(ErrorKind::InvalidArgument, "mask entries must be 0 or 1");
            if (m == 1.0 && !std::isfinite(values(t, b))) {
                fail(ErrorKind::NonFinite, "observed value at (" + std::to_string(t) + ", " +
                                               std::to_string(b) + ") is not finite");
            }
            if (m == 0.0) s.series.values(t, b) = 0.0;
        }
    }
    s.series.timestamps = std::move(timestamps);
    s.series.deltas = compute_deltas(s.series.mask, s.series.timestamps);
    for (double a : ancillary.values) {
        if (!std::isfinite(a)) fail(ErrorKind::NonFinite, "ancillary value is not finite");
    }
    s.ancillary = ancillary;
    validate_abundance(reference);
    s.reference.values = reference;
    return s;
}

NormStats fit_normalization(const Dataset& dataset, std::span<const std::size_t> train_ids) {
    if (train_ids.empty()) fail(ErrorKind::EmptyTrainingSet, "no training samples to fit normalization");
    const int bands = dataset.bands();
    Vector sum = Vector::Zero(bands), sum_sq = Vector::Zero(bands), count = Vector::Zero(bands);
    std::array<double, kAncillaryDim> anc_sum{}, anc_sq{};

    // Two-pass for numerical stability: means first, then squared deviations.
    for (std::size_t id : train_ids) {
        const auto& s = dataset[id].series;
        for (int t = 0; t < s.steps(); ++t) {
            for (int b = 0; b < bands; ++b) {
                if (s.mask(t, b) == 1.0) {
                    sum[b] += s.values(t, b);
                    count[b] += 1.0;
                }
            }
        }
        for (std::size_t j = 0; j < kAncillaryDim; ++j) anc_sum[j] += dataset[id].ancillary.values[j];
    }
    NormStats stats;
    stats.band_mean = Vector::Zero(bands);
    for (int b = 0; b < bands; ++b) stats.band_mean[b] = count[b] > 0 ? sum[b] / count[b] : 0.0;
    const double n = static_cast<double>(train_ids.size());
    for (std::size_t j = 0; j < kAncillaryDim; ++j) stats.anc_mean[j] = anc_sum[j] / n;

    for (std::size_t id : train_ids) {
        const auto& s = dataset[id].series;
        for (int t = 0; t < s.steps(); ++t) {
            for (int b = 0; b < bands; ++b) {
                if (s.mask(t, b) == 1.0) {
                    const double d = s.values(t, b) - stats.band_mean[b];
                    sum_sq[b] += d * d;
                }
            }
        }
        for (std::size_t j = 0; j < kAncillaryDim; ++j) {
            const double d = dataset[id].ancillary.values[j] - stats.anc_mean[j];
            anc_sq[j] += d * d;
        }
    }
    stats.band_std = Vector::Zero(bands);
    for (int b = 0; b < bands; ++b) {
        const double var = count[b] > 0 ? sum_sq[b] / count[b] : 0.0;
        stats.band_std[b] = std::max(std::sqrt(var), kStdFloor);
    }
    for (std::size_t j = 0; j < kAncillaryDim; ++j) {
        stats.anc_std[j] = std::max(std::sqrt(anc_sq[j] / n), kStdFloor);
    }
    return stats;
}

Dataset apply_normalization(const Dataset& dataset, const NormStats& stats) {
    if (dataset.norm_stats()) fail(ErrorKind::InvalidArgument, "dataset is already normalized");
    if (stats.band_mean.size() != dataset.bands() || stats.band_std.size() != dataset.bands()) {
        fail(ErrorKind::ShapeMismatch, "normalization statistics do not match the band count");
    }
    std::vector<Sample> out = dataset.samples();
    for (auto& s : out) {
        auto& v = s.series.values;
        for (Eigen::Index t = 0; t < v.rows(); ++t) {
            for (Eigen::Index b = 0; b < v.cols(); ++b) {
                v(t, b) = s.series.mask(t, b) == 1.0 ? (v(t, b) - stats.band_mean[b]) / stats.band_std[b] : 0.0;
            }
        }
        for (std::size_t j = 0; j < kAncillaryDim; ++j) {
            s.ancillary.values[j] = (s.ancillary.values[j] - stats.anc_mean[j]) / stats.anc_std[j];
        }
    }
    return Dataset(std::move(out), dataset.legend(), stats);
}

Dataset denormalize(const Dataset& dataset) {
    if (!dataset.norm_stats()) fail(ErrorKind::InvalidArgument, "dataset is not normalized");
    const NormStats& stats = *dataset.norm_stats();
    std::vector<Sample> out = dataset.samples();
    for (auto& s : out) {
        auto& v = s.series.values;
        for (Eigen::Index t = 0; t < v.rows(); ++t) {
            for (Eigen::Index b = 0; b < v.cols(); ++b) {
                v(t, b) = s.series.mask(t, b) == 1.0 ? v(t, b) * stats.band_std[b] + stats.band_mean[b] : 0.0;
            }
        }
        for (std::size_t j = 0; j < kAncillaryDim; ++j) {
            s.ancillary.values[j] = s.ancillary.values[j] * stats.anc_std[j] + stats.anc_mean[j];
        }
    }
    return Dataset(std::move(out), dataset.legend());
}

SpectralSeries with_placeholder(const SpectralSeries& series, double placeholder) {
    SpectralSeries out = series;
    for (Eigen::Index t = 0; t < out.values.rows(); ++t) {
        for (Eigen::Index b = 0; b < out.values.cols(); ++b) {
            if (out.mask(t, b) != 1.0) out.values(t, b) = placeholder;
        }
    }
    return out;
}

}  // namespace stunmix
