#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stunmix/error.hpp"
#include "stunmix/ingest.hpp"

using namespace stunmix;
using namespace stunmix::ingest;
using namespace std::chrono;

namespace {

LabelRaster uniform_raster(int w, int h, int k, int label) {
    LabelRaster r;
    r.width = w;
    r.height = h;
    r.classes = k;
    r.labels.assign(static_cast<std::size_t>(w * h), label);
    return r;
}

template <class Fn>
ErrorKind kind_of(Fn fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Io;
}

}  // namespace

TEST(Aggregate, UniformBlockIsOneHot) {
    const auto grid = aggregate_abundances(uniform_raster(46, 46, 4, 2), kDefaultAggregationFactor);
    ASSERT_EQ(grid.abundances.size(), 1u);
    EXPECT_EQ(grid.abundances[0], (Vector(4) << 0, 0, 1, 0).finished());
    EXPECT_EQ(grid.valid_counts[0], 46 * 46);
}

TEST(Aggregate, ExactHalfSplit) {
    LabelRaster r = uniform_raster(46, 46, 4, 0);
    for (std::size_t i = 1058; i < r.labels.size(); ++i) r.labels[i] = 1;
    const auto grid = aggregate_abundances(r, 46);
    EXPECT_EQ(grid.abundances[0], (Vector(4) << 0.5, 0.5, 0, 0).finished());
}

TEST(Aggregate, NoDataExcludedFromDenominator) {
    LabelRaster r = uniform_raster(2, 2, 3, 0);
    r.labels[3] = kNoData;
    const auto grid = aggregate_abundances(r, 2);
    EXPECT_EQ(grid.abundances[0], (Vector(3) << 1, 0, 0).finished());
    EXPECT_EQ(grid.valid_counts[0], 3);
}

TEST(Aggregate, AllNoDataCellExcluded) {
    LabelRaster r = uniform_raster(4, 2, 2, 1);
    r.labels[0] = r.labels[1] = r.labels[4] = r.labels[5] = kNoData;
    const auto grid = aggregate_abundances(r, 2);
    EXPECT_TRUE(grid.excluded[0]);
    EXPECT_FALSE(grid.excluded[1]);
    EXPECT_EQ(grid.abundances[0].size(), 0);
}

TEST(Aggregate, Errors) {
    EXPECT_EQ(kind_of([] { aggregate_abundances(uniform_raster(5, 4, 2, 0), 2); }), ErrorKind::NotDivisible);
    EXPECT_EQ(kind_of([] { aggregate_abundances(uniform_raster(4, 4, 2, kNoData), 2); }), ErrorKind::AllNoData);
}

TEST(Aggregate, MatchesBlockCountingOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int f = 1 + static_cast<int>(rng() % 5), cw = 1 + static_cast<int>(rng() % 4),
                  ch = 1 + static_cast<int>(rng() % 4), K = 2 + static_cast<int>(rng() % 4);
        LabelRaster r = uniform_raster(cw * f, ch * f, K, 0);
        for (auto& l : r.labels) l = static_cast<int>(rng() % (K + 1)) - 1;
        r.labels[0] = 0;
        const auto grid = aggregate_abundances(r, f);
        const auto counts = oracle::block_counts(r.labels, r.width, r.height, K, f);
        for (std::size_t c = 0; c < counts.size(); ++c) {
            std::int64_t n = 0;
            for (auto v : counts[c]) n += v;
            ASSERT_EQ(grid.valid_counts[c], n);
            if (n == 0) continue;
            for (int k = 0; k < K; ++k) EXPECT_EQ(grid.abundances[c][k], static_cast<double>(counts[c][k]) / n);
        }
    }
}

TEST(LabelRasterIo, RoundTripAndValidation) {
    LabelRaster r = uniform_raster(3, 2, 4, 1);
    r.labels[2] = kNoData;
    r.labels[4] = 3;
    const LabelRaster back = parse_label_raster(format_label_raster(r));
    EXPECT_EQ(back.labels, r.labels);
    EXPECT_EQ(back.width, 3);
    EXPECT_EQ(back.classes, 4);
    EXPECT_EQ(kind_of([] { parse_label_raster("2 1 10 2\n0 5\n"); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([] { parse_label_raster("2 1 10 2\n0\n"); }), ErrorKind::Format);
}

TEST(AbundanceCsv, ExcludedCellsHaveEmptyAbundances) {
    LabelRaster r = uniform_raster(2, 1, 2, 1);
    r.labels[0] = kNoData;
    const std::string csv = format_abundance_grid_csv(aggregate_abundances(r, 1));
    EXPECT_EQ(csv, "cell_x,cell_y,valid_count,excluded,abund_1,abund_2\n0,0,0,1,,\n1,0,1,0,0,1\n");
}

TEST(MonthlyComposite, DocumentedExamples) {
    const std::vector<year_month> months = {2015y / January, 2015y / February, 2015y / March};
    ObservationStream s;
    s.bands.resize(1);
    s.bands[0] = {{day_index(2015y / January / 5), 0.2, true},
                  {day_index(2015y / January / 13), 0.4, true},
                  {day_index(2015y / February / 10), 0.9, false}};
    const auto c = monthly_composite(s, months);
    EXPECT_NEAR(c.values(0, 0), 0.3, 1e-15);
    EXPECT_EQ(c.mask(0, 0), 1.0);
    EXPECT_EQ(c.mask(1, 0), 0.0);  // only a QA-failing observation
    EXPECT_EQ(c.mask(2, 0), 0.0);  // no observations
}

TEST(MonthlyComposite, MatchesGroupByOracle) {
    std::mt19937_64 rng(5);
    std::vector<year_month> months;
    for (int m = 1; m <= 12; ++m) months.push_back(2016y / month{static_cast<unsigned>(m)});
    ObservationStream s;
    s.bands.resize(3);
    const std::int64_t start = day_index(2015y / December / 20);
    for (auto& band : s.bands) {
        for (std::int64_t d = start + static_cast<std::int64_t>(rng() % 8); d < start + 400; d += 8) {
            band.push_back({d, static_cast<double>(rng() % 1000) / 1000.0, rng() % 5 != 0});
        }
    }
    const auto c = monthly_composite(s, months);
    for (std::size_t b = 0; b < 3; ++b) {
        std::vector<std::pair<std::pair<int, unsigned>, double>> rows;
        for (const auto& o : s.bands[b]) {
            if (o.qa_pass) rows.push_back({oracle::civil_month(o.day), o.value});
        }
        const auto means = oracle::groupby_mean(rows);
        for (int t = 0; t < 12; ++t) {
            const auto it = means.find({2016, static_cast<unsigned>(t + 1)});
            if (it == means.end()) {
                EXPECT_EQ(c.mask(t, b), 0.0);
            } else {
                EXPECT_EQ(c.mask(t, b), 1.0);
                EXPECT_NEAR(c.values(t, b), it->second, 1e-14);
            }
        }
    }
}

TEST(MergeSensors, MeanPassthroughMissing) {
    CompositeSeries terra{Matrix(1, 3), Matrix(1, 3)}, aqua{Matrix(1, 3), Matrix(1, 3)};
    terra.values << 0.2, 0.0, 0.0;
    terra.mask << 1, 0, 0;
    aqua.values << 0.4, 0.4, 0.0;
    aqua.mask << 1, 1, 0;
    const auto m = merge_sensors(terra, aqua);
    EXPECT_NEAR(m.values(0, 0), 0.3, 1e-15);
    EXPECT_EQ(m.values(0, 1), 0.4);
    EXPECT_EQ(m.mask(0, 2), 0.0);
    CompositeSeries wrong{Matrix(2, 3), Matrix(2, 3)};
    EXPECT_EQ(kind_of([&] { merge_sensors(terra, wrong); }), ErrorKind::ShapeMismatch);
}

namespace {

std::vector<CompositeSeries> flat_series(std::size_t n) {
    return std::vector<CompositeSeries>(n, CompositeSeries{Matrix::Constant(3, 2, 0.1), Matrix::Ones(3, 2)});
}

}  // namespace

TEST(AssembleDataset, CountsAndExclusion) {
    const auto grid = aggregate_abundances(uniform_raster(4, 4, 2, 1), 2);
    const auto legend = std::vector<std::string>{"a", "b"};
    const Dataset ds = assemble_dataset(grid, flat_series(4), std::vector<AncillaryVector>(4), legend);
    EXPECT_EQ(ds.size(), 4u);
    EXPECT_EQ(ds[3].pixel_id, "px_1_1");

    LabelRaster r = uniform_raster(4, 4, 2, 1);
    r.labels[0] = r.labels[1] = r.labels[4] = r.labels[5] = kNoData;
    const Dataset ds3 = assemble_dataset(aggregate_abundances(r, 2), flat_series(4), std::vector<AncillaryVector>(4), legend);
    EXPECT_EQ(ds3.size(), 3u);
}

TEST(AssembleDataset, Errors) {
    const auto legend = std::vector<std::string>{"a", "b"};
    AbundanceGrid empty;
    EXPECT_EQ(kind_of([&] { assemble_dataset(empty, {}, {}, legend); }), ErrorKind::EmptyDataset);
    const auto grid = aggregate_abundances(uniform_raster(4, 4, 2, 1), 2);
    EXPECT_EQ(kind_of([&] { assemble_dataset(grid, flat_series(3), std::vector<AncillaryVector>(4), legend); }),
              ErrorKind::AlignmentMismatch);
}
