#include "stunmix/ingest.hpp"

#include <numeric>
#include <sstream>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

namespace stunmix::ingest {

LabelRaster parse_label_raster(std::string_view text) {
    std::istringstream in{std::string(text)};
    LabelRaster r;
    if (!(in >> r.width >> r.height >> r.cell_size >> r.classes)) {
        fail(ErrorKind::Format, "label raster header must be 'width height cell_size K'");
    }
    if (r.width <= 0 || r.height <= 0) fail(ErrorKind::Format, "label raster dimensions must be positive");
    if (r.classes < 1) fail(ErrorKind::Format, "label raster needs K >= 1");
    r.labels.resize(static_cast<std::size_t>(r.width) * r.height);
    for (auto& label : r.labels) {
        if (!(in >> label)) fail(ErrorKind::Format, "label raster has fewer cells than width*height");
        if (label != kNoData && (label < 0 || label >= r.classes)) {
            fail(ErrorKind::Format, "label " + std::to_string(label) + " outside [0, K) and not NO_DATA");
        }
    }
    std::string extra;
    if (in >> extra) fail(ErrorKind::Format, "label raster has more cells than width*height");
    return r;
}

LabelRaster load_label_raster(const std::filesystem::path& path) { return parse_label_raster(io::read_file(path)); }

std::string format_label_raster(const LabelRaster& raster) {
    std::string out = std::to_string(raster.width) + ' ' + std::to_string(raster.height) + ' ' +
                      io::format_double(raster.cell_size) + ' ' + std::to_string(raster.classes) + '\n';
    for (int y = 0; y < raster.height; ++y) {
        for (int x = 0; x < raster.width; ++x) {
            if (x) out += ' ';
            out += std::to_string(raster.at(x, y));
        }
        out += '\n';
    }
    return out;
}

AbundanceGrid aggregate_abundances(const LabelRaster& raster, int factor) {
    if (factor < 1) fail(ErrorKind::InvalidArgument, "aggregation factor must be >= 1");
    if (raster.width % factor != 0 || raster.height % factor != 0) {
        fail(ErrorKind::NotDivisible, "raster " + std::to_string(raster.width) + "x" +
                                          std::to_string(raster.height) + " is not divisible by factor " +
                                          std::to_string(factor));
    }
    AbundanceGrid g;
    g.width = raster.width / factor;
    g.height = raster.height / factor;
    g.classes = raster.classes;
    const std::size_t cells = static_cast<std::size_t>(g.width) * g.height;
    g.abundances.resize(cells);
    g.valid_counts.assign(cells, 0);
    g.excluded.assign(cells, false);

    bool any_valid = false;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(raster.classes));
    for (int cy = 0; cy < g.height; ++cy) {
        for (int cx = 0; cx < g.width; ++cx) {
            std::fill(counts.begin(), counts.end(), 0);
            std::int64_t valid = 0;
            for (int y = cy * factor; y < (cy + 1) * factor; ++y) {
                for (int x = cx * factor; x < (cx + 1) * factor; ++x) {
                    const int label = raster.at(x, y);
                    if (label == kNoData) continue;
                    ++counts[static_cast<std::size_t>(label)];
                    ++valid;
                }
            }
            const std::size_t i = g.index(cx, cy);
            g.valid_counts[i] = valid;
            if (valid == 0) {
                g.excluded[i] = true;
                continue;
            }
            any_valid = true;
            Vector a(raster.classes);
            for (int k = 0; k < raster.classes; ++k) {
                a[k] = static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(valid);
            }
            g.abundances[i] = std::move(a);
        }
    }
    if (!any_valid) fail(ErrorKind::AllNoData, "every cell of the label raster is NO_DATA");
    return g;
}

std::string format_abundance_grid_csv(const AbundanceGrid& grid) {
    std::string out = "cell_x,cell_y,valid_count,excluded";
    for (int k = 0; k < grid.classes; ++k) out += ",abund_" + std::to_string(k + 1);
    out += '\n';
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const std::size_t i = grid.index(x, y);
            out += std::to_string(x) + ',' + std::to_string(y) + ',' + std::to_string(grid.valid_counts[i]) + ',' +
                   (grid.excluded[i] ? "1" : "0");
            for (int k = 0; k < grid.classes; ++k) {
                out += ',';
                if (!grid.excluded[i]) io::append_double(out, grid.abundances[i][k]);
            }
            out += '\n';
        }
    }
    return out;
}

std::int64_t day_index(std::chrono::year_month_day date) {
    return std::chrono::sys_days{date}.time_since_epoch().count();
}

CompositeSeries monthly_composite(const ObservationStream& stream,
                                  const std::vector<std::chrono::year_month>& year_months) {
    if (year_months.empty()) fail(ErrorKind::InvalidArgument, "month list is empty");
    const auto steps = static_cast<Eigen::Index>(year_months.size());
    const auto bands = static_cast<Eigen::Index>(stream.bands.size());
    CompositeSeries out{Matrix::Zero(steps, bands), Matrix::Zero(steps, bands)};

    for (Eigen::Index b = 0; b < bands; ++b) {
        const auto& obs = stream.bands[static_cast<std::size_t>(b)];
        for (std::size_t i = 1; i < obs.size(); ++i) {
            if (obs[i].day <= obs[i - 1].day) {
                fail(ErrorKind::InvalidArgument, "observation timestamps must be increasing per band");
            }
        }
        for (Eigen::Index t = 0; t < steps; ++t) {
            const auto& ym = year_months[static_cast<std::size_t>(t)];
            const std::int64_t first = day_index(ym / std::chrono::day{1});
            const std::int64_t last = day_index(ym / std::chrono::last);
            double sum = 0.0;
            int count = 0;
            for (const auto& o : obs) {
                if (o.day < first || o.day > last || !o.qa_pass) continue;
                sum += o.value;
                ++count;
            }
            if (count > 0) {
                out.values(t, b) = sum / count;
                out.mask(t, b) = 1.0;
            }
        }
    }
    return out;
}

CompositeSeries merge_sensors(const CompositeSeries& terra, const CompositeSeries& aqua) {
    if (terra.values.rows() != aqua.values.rows() || terra.values.cols() != aqua.values.cols() ||
        terra.mask.rows() != terra.values.rows() || aqua.mask.rows() != aqua.values.rows() ||
        terra.mask.cols() != terra.values.cols() || aqua.mask.cols() != aqua.values.cols()) {
        fail(ErrorKind::ShapeMismatch, "Terra and Aqua composites differ in shape");
    }
    CompositeSeries out{Matrix::Zero(terra.values.rows(), terra.values.cols()),
                        Matrix::Zero(terra.values.rows(), terra.values.cols())};
    for (Eigen::Index t = 0; t < out.values.rows(); ++t) {
        for (Eigen::Index b = 0; b < out.values.cols(); ++b) {
            const bool has_t = terra.mask(t, b) == 1.0;
            const bool has_a = aqua.mask(t, b) == 1.0;
            if (has_t && has_a) {
                out.values(t, b) = 0.5 * (terra.values(t, b) + aqua.values(t, b));
            } else if (has_t) {
                out.values(t, b) = terra.values(t, b);
            } else if (has_a) {
                out.values(t, b) = aqua.values(t, b);
            } else {
                continue;
            }
            out.mask(t, b) = 1.0;
        }
    }
    return out;
}

Dataset assemble_dataset(const AbundanceGrid& abundances, const std::vector<CompositeSeries>& series,
                         const std::vector<AncillaryVector>& ancillary, const std::vector<std::string>& legend) {
    const std::size_t cells = static_cast<std::size_t>(abundances.width) * abundances.height;
    if (cells == 0) fail(ErrorKind::EmptyDataset, "coarse grid is empty");
    if (series.size() != cells || ancillary.size() != cells || abundances.abundances.size() != cells) {
        fail(ErrorKind::AlignmentMismatch, "abundance, series and ancillary grids are not aligned");
    }
    if (static_cast<int>(legend.size()) != abundances.classes) {
        fail(ErrorKind::AlignmentMismatch, "legend size differs from the abundance class count");
    }
    std::vector<Sample> samples;
    for (int y = 0; y < abundances.height; ++y) {
        for (int x = 0; x < abundances.width; ++x) {
            const std::size_t i = abundances.index(x, y);
            if (abundances.excluded[i]) continue;
            const auto& s = series[i];
            std::vector<double> timestamps(static_cast<std::size_t>(s.values.rows()));
            std::iota(timestamps.begin(), timestamps.end(), 0.0);
            samples.push_back(make_sample(s.values, s.mask, std::move(timestamps), ancillary[i],
                                          abundances.abundances[i], x, y,
                                          "px_" + std::to_string(x) + "_" + std::to_string(y)));
        }
    }
    if (samples.empty()) fail(ErrorKind::EmptyDataset, "every coarse cell is excluded");
    return Dataset(std::move(samples), legend);
}

}  // namespace stunmix::ingest
