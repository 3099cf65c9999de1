#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stunmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSimplexTolerance = 1e-6;
inline constexpr double kStdFloor = 1e-8;

/// Per-pixel multispectral time series. Rows are time steps, columns bands.
/// Entries of `values` where `mask` is 0 are placeholders and never read as
/// data by the model.
struct SpectralSeries {
    Matrix values;  // T x B
    Matrix mask;    // T x B, entries in {0, 1}
    Matrix deltas;  // T x B, months since previous observation of the band
    std::vector<double> timestamps;

    int steps() const { return static_cast<int>(values.rows()); }
    int bands() const { return static_cast<int>(values.cols()); }
};

/// Geo-topographic (first four) and climatic (last five) pixel covariates.
enum class AncillaryFeature : std::size_t {
    Longitude = 0,
    Latitude,
    Altitude,
    Slope,
    Precipitation,
    PotentialEvapotranspiration,
    MeanTemperature,
    MaxTemperature,
    MinTemperature,
};

inline constexpr std::size_t kAncillaryDim = 9;
inline constexpr std::size_t kGeoBegin = 0, kGeoEnd = 4;
inline constexpr std::size_t kClimBegin = 4, kClimEnd = 9;

/// CSV column names, in storage order.
inline constexpr std::array<const char*, kAncillaryDim> kAncillaryColumns = {
    "lon", "lat", "altitude", "slope", "precip", "pet", "tmean", "tmax", "tmin"};

struct AncillaryVector {
    std::array<double, kAncillaryDim> values{};

    double operator[](AncillaryFeature f) const { return values[static_cast<std::size_t>(f)]; }
    double& operator[](AncillaryFeature f) { return values[static_cast<std::size_t>(f)]; }
};

/// Class fractions of a pixel; lies on the probability simplex.
struct AbundanceVector {
    Vector values;

    int classes() const { return static_cast<int>(values.size()); }
};

struct Sample {
    std::string pixel_id;
    int grid_x = 0;
    int grid_y = 0;
    SpectralSeries series;
    AncillaryVector ancillary;
    AbundanceVector reference;
};

struct NormStats {
    Vector band_mean;
    Vector band_std;
    std::array<double, kAncillaryDim> anc_mean{};
    std::array<double, kAncillaryDim> anc_std{};
};

/// Immutable collection of samples sharing T, B and K.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Sample> samples, std::vector<std::string> legend,
            std::optional<NormStats> norm_stats = std::nullopt);

    const std::vector<Sample>& samples() const { return samples_; }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }

    const std::vector<std::string>& legend() const { return legend_; }
    /// Set when the values are z-scores produced by apply_normalization.
    const std::optional<NormStats>& norm_stats() const { return norm_stats_; }

    int steps() const { return steps_; }
    int bands() const { return bands_; }
    int classes() const { return static_cast<int>(legend_.size()); }

private:
    std::vector<Sample> samples_;
    std::vector<std::string> legend_;
    std::optional<NormStats> norm_stats_;
    int steps_ = 0;
    int bands_ = 0;
};

struct ClassLegend {
    int level = 1;
    std::vector<std::string> names;

    static ClassLegend level1();
    static ClassLegend level2();
    /// Level-1/2 names for K = 4/10, generic "class_k" names otherwise.
    static ClassLegend for_classes(int k);
};

/// Throws SimplexViolation unless entries are >= 0 and sum to 1 within `tol`.
void validate_abundance(std::span<const double> values, double tol = kSimplexTolerance);
void validate_abundance(const Vector& values, double tol = kSimplexTolerance);

/// Elapsed time since the previous observation of each band. Row 0 is zero.
Matrix compute_deltas(const Matrix& mask, std::span<const double> timestamps);

Sample make_sample(const Matrix& values, const Matrix& mask, std::vector<double> timestamps,
                   const AncillaryVector& ancillary, const Vector& reference, int grid_x, int grid_y,
                   std::string pixel_id = {});

/// Statistics over observed entries of the samples listed in `train_ids`.
NormStats fit_normalization(const Dataset& dataset, std::span<const std::size_t> train_ids);

Dataset apply_normalization(const Dataset& dataset, const NormStats& stats);

/// Inverse of apply_normalization on observed entries and ancillary data.
Dataset denormalize(const Dataset& dataset);

/// Copy of `series` with values at missing positions replaced by `placeholder`.
SpectralSeries with_placeholder(const SpectralSeries& series, double placeholder);

}  // namespace stunmix
