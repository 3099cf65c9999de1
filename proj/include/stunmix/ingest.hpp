#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stunmix/data_model.hpp"

namespace stunmix::ingest {

inline constexpr int kNoData = -1;
/// 460 m coarse pixels over a 10 m rasterized label map.
inline constexpr int kDefaultAggregationFactor = 46;

/// Fine-grid categorical land-cover map, row-major.
struct LabelRaster {
    int width = 0;
    int height = 0;
    double cell_size = 10.0;
    int classes = 0;
    std::vector<int> labels;

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-class fractions on the coarse grid. Cells whose fine cells are all
/// NO_DATA are excluded and carry no abundance.
struct AbundanceGrid {
    int width = 0;
    int height = 0;
    int classes = 0;
    std::vector<Vector> abundances;       // row-major, empty vector when excluded
    std::vector<std::int64_t> valid_counts;  // non-NO_DATA fine cells per coarse cell
    std::vector<bool> excluded;

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

/// Format: first line `width height cell_size K`, then `height` lines of
/// `width` whitespace-separated labels, -1 for NO_DATA.
LabelRaster parse_label_raster(std::string_view text);
LabelRaster load_label_raster(const std::filesystem::path& path);
std::string format_label_raster(const LabelRaster& raster);

AbundanceGrid aggregate_abundances(const LabelRaster& raster, int factor);

/// CSV with columns `cell_x,cell_y,valid_count,excluded,abund_1..abund_K`.
std::string format_abundance_grid_csv(const AbundanceGrid& grid);

struct Observation {
    std::int64_t day = 0;  // days since 1970-01-01
    double value = 0.0;
    bool qa_pass = true;
};

/// Observations of one pixel at ~8-day cadence, one list per band.
struct ObservationStream {
    std::vector<std::vector<Observation>> bands;
};

struct CompositeSeries {
    Matrix values;  // T x B
    Matrix mask;
};

std::int64_t day_index(std::chrono::year_month_day date);

/// Monthly mean of QA-passing observations; one output row per entry of
/// `year_months`.
CompositeSeries monthly_composite(const ObservationStream& stream,
                                  const std::vector<std::chrono::year_month>& year_months);

/// Mean where both sensors observed, passthrough where one did.
CompositeSeries merge_sensors(const CompositeSeries& terra, const CompositeSeries& aqua);

/// Builds one sample per non-excluded coarse cell. `series` and `ancillary`
/// are row-major over the coarse grid.
Dataset assemble_dataset(const AbundanceGrid& abundances, const std::vector<CompositeSeries>& series,
                         const std::vector<AncillaryVector>& ancillary, const std::vector<std::string>& legend);

}  // namespace stunmix::ingest
