#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "stunmix/data_model.hpp"
#include "stunmix/error.hpp"

using namespace stunmix;

namespace {

std::vector<double> months(int T) {
    std::vector<double> ts;
    for (int t = 0; t < T; ++t) ts.push_back(t);
    return ts;
}

Vector abund(std::initializer_list<double> v) {
    Vector a(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double x : v) a[i++] = x;
    return a;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Io;
}

}  // namespace

TEST(MakeSample, UniformReferenceAccepted) {
    const Sample s = make_sample(Matrix::Constant(12, 7, 0.2), Matrix::Ones(12, 7), months(12), {},
                                 abund({0.25, 0.25, 0.25, 0.25}), 0, 0);
    EXPECT_EQ(s.series.steps(), 12);
    EXPECT_EQ(s.series.bands(), 7);
    EXPECT_EQ(s.reference.classes(), 4);
}

TEST(MakeSample, SimplexViolationRejected) {
    EXPECT_EQ(kind_of([] {
                  make_sample(Matrix::Zero(12, 7), Matrix::Ones(12, 7), months(12), {}, abund({0.5, 0.5, 0, 0.2}), 0, 0);
              }),
              ErrorKind::SimplexViolation);
    EXPECT_EQ(kind_of([] { validate_abundance(abund({1.2, -0.2})); }), ErrorKind::SimplexViolation);
}

TEST(MakeSample, FullyMissingMonthAccepted) {
    Matrix mask = Matrix::Ones(12, 7);
    mask.row(3).setZero();
    Matrix values = Matrix::Constant(12, 7, 0.3);
    values.row(3).setConstant(std::numeric_limits<double>::quiet_NaN());
    const Sample s = make_sample(values, mask, months(12), {}, abund({1, 0, 0, 0}), 2, 3, "p");
    EXPECT_TRUE((s.series.mask.row(3).array() == 0.0).all());
    EXPECT_TRUE((s.series.values.row(3).array() == 0.0).all());
    EXPECT_EQ(s.series.deltas(4, 0), 2.0);
}

TEST(MakeSample, ShapeAndValueChecks) {
    EXPECT_EQ(kind_of([] {
                  make_sample(Matrix::Zero(12, 7), Matrix::Ones(11, 7), months(12), {}, abund({1}), 0, 0);
              }),
              ErrorKind::ShapeMismatch);
    EXPECT_EQ(kind_of([] {
                  Matrix v = Matrix::Zero(2, 2);
                  v(0, 0) = std::numeric_limits<double>::infinity();
                  make_sample(v, Matrix::Ones(2, 2), months(2), {}, abund({1}), 0, 0);
              }),
              ErrorKind::NonFinite);
}

TEST(ComputeDeltas, AllObservedUnitSpacing) {
    const Matrix d = compute_deltas(Matrix::Ones(12, 3), months(12));
    EXPECT_TRUE((d.row(0).array() == 0.0).all());
    EXPECT_TRUE((d.bottomRows(11).array() == 1.0).all());
}

TEST(ComputeDeltas, GapAccumulates) {
    Matrix mask = Matrix::Ones(5, 3);
    mask(1, 0) = 0.0;
    const Matrix d = compute_deltas(mask, months(5));
    EXPECT_EQ(d(2, 0), 2.0);
    EXPECT_EQ(d(2, 1), 1.0);
    EXPECT_EQ(d(2, 2), 1.0);
    EXPECT_EQ(d(3, 0), 1.0);
}

TEST(ComputeDeltas, SingleStep) {
    const Matrix d = compute_deltas(Matrix::Ones(1, 4), months(1));
    EXPECT_EQ(d.rows(), 1);
    EXPECT_TRUE((d.array() == 0.0).all());
}

TEST(ComputeDeltas, IrregularTimestamps) {
    Matrix mask = Matrix::Ones(3, 1);
    mask(1, 0) = 0.0;
    const Matrix d = compute_deltas(mask, std::vector<double>{0.0, 0.5, 2.0});
    EXPECT_EQ(d(1, 0), 0.5);
    EXPECT_EQ(d(2, 0), 2.0);
}

namespace {

Dataset one_band_dataset(const std::vector<std::pair<double, double>>& value_mask) {
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < value_mask.size(); ++i) {
        Matrix v(1, 1), m(1, 1);
        v(0, 0) = value_mask[i].first;
        m(0, 0) = value_mask[i].second;
        AncillaryVector anc;
        anc.values.fill(static_cast<double>(i));
        samples.push_back(make_sample(v, m, months(1), anc, abund({1.0}), static_cast<int>(i), 0));
    }
    return Dataset(std::move(samples), {"only"});
}

}  // namespace

TEST(Normalization, ConstantBandStdFloored) {
    const Dataset ds = one_band_dataset({{5, 1}, {5, 1}, {5, 1}});
    const std::vector<std::size_t> ids = {0, 1, 2};
    const NormStats st = fit_normalization(ds, ids);
    EXPECT_EQ(st.band_mean[0], 5.0);
    EXPECT_EQ(st.band_std[0], kStdFloor);
}

TEST(Normalization, SymmetricPair) {
    const Dataset ds = one_band_dataset({{-1, 1}, {1, 1}});
    const std::vector<std::size_t> ids = {0, 1};
    const NormStats st = fit_normalization(ds, ids);
    EXPECT_DOUBLE_EQ(st.band_mean[0], 0.0);
    EXPECT_DOUBLE_EQ(st.band_std[0], 1.0);
    EXPECT_DOUBLE_EQ(st.anc_mean[0], 0.5);
}

TEST(Normalization, MissingEntriesExcluded) {
    const Dataset ds = one_band_dataset({{2, 1}, {100, 0}});
    const std::vector<std::size_t> ids = {0, 1};
    EXPECT_EQ(fit_normalization(ds, ids).band_mean[0], 2.0);
}

TEST(Normalization, OnlyTrainingIdsUsed) {
    const Dataset ds = one_band_dataset({{1, 1}, {3, 1}, {1000, 1}});
    const std::vector<std::size_t> ids = {0, 1};
    EXPECT_EQ(fit_normalization(ds, ids).band_mean[0], 2.0);
    EXPECT_EQ(kind_of([&] { fit_normalization(ds, std::vector<std::size_t>{}); }), ErrorKind::EmptyTrainingSet);
}

TEST(Normalization, ZScoresAndRoundTrip) {
    const Dataset ds = one_band_dataset({{-1, 1}, {1, 1}, {7, 0}});
    const std::vector<std::size_t> ids = {0, 1};
    const NormStats st = fit_normalization(ds, ids);
    const Dataset z = apply_normalization(ds, st);
    ASSERT_TRUE(z.norm_stats().has_value());
    EXPECT_DOUBLE_EQ(z[0].series.values(0, 0), -1.0);  // mean - std
    EXPECT_DOUBLE_EQ(z[1].series.values(0, 0), 1.0);   // mean + std
    EXPECT_EQ(z[2].series.values(0, 0), 0.0);          // missing stays a zero placeholder
    EXPECT_EQ(z[2].series.mask(0, 0), 0.0);
    const Dataset back = denormalize(z);
    EXPECT_FALSE(back.norm_stats().has_value());
    EXPECT_DOUBLE_EQ(back[0].series.values(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(back[1].ancillary.values[0], 1.0);
}

TEST(Dataset, RejectsMixedShapes) {
    std::vector<Sample> samples;
    samples.push_back(make_sample(Matrix::Zero(3, 2), Matrix::Ones(3, 2), months(3), {}, abund({1, 0}), 0, 0));
    samples.push_back(make_sample(Matrix::Zero(4, 2), Matrix::Ones(4, 2), months(4), {}, abund({1, 0}), 1, 0));
    EXPECT_EQ(kind_of([&] { Dataset(samples, {"a", "b"}); }), ErrorKind::ShapeMismatch);
}

TEST(Dataset, LegendMustMatchClasses) {
    std::vector<Sample> samples;
    samples.push_back(make_sample(Matrix::Zero(3, 2), Matrix::Ones(3, 2), months(3), {}, abund({1, 0}), 0, 0));
    EXPECT_EQ(kind_of([&] { Dataset(samples, {"a", "b", "c"}); }), ErrorKind::ShapeMismatch);
}

TEST(ClassLegend, Levels) {
    EXPECT_EQ(ClassLegend::level1().names.size(), 4u);
    EXPECT_EQ(ClassLegend::level2().names.size(), 10u);
    EXPECT_EQ(ClassLegend::for_classes(4).names, ClassLegend::level1().names);
    EXPECT_EQ(ClassLegend::for_classes(3).names.size(), 3u);
}

TEST(WithPlaceholder, OnlyMissingPositionsChange) {
    Matrix mask = Matrix::Ones(2, 2);
    mask(0, 1) = 0.0;
    const Sample s = make_sample(Matrix::Constant(2, 2, 0.5), mask, months(2), {}, abund({1}), 0, 0);
    const SpectralSeries p = with_placeholder(s.series, -9.0);
    EXPECT_EQ(p.values(0, 1), -9.0);
    EXPECT_EQ(p.values(0, 0), 0.5);
}
