#include "stunmix/dataset_csv.hpp"

#include <numeric>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

namespace stunmix {

namespace {

constexpr std::size_t kLeadingColumns = 3 + kAncillaryDim;

std::string band_column(int b, int t) { return "b" + std::to_string(b + 1) + "_m" + std::to_string(t + 1); }

}  // namespace

std::string dataset_csv_header(int bands, int steps, int classes) {
    std::string h = "pixel_id,grid_x,grid_y";
    for (const char* name : kAncillaryColumns) {
        h += ',';
        h += name;
    }
    for (int b = 0; b < bands; ++b) {
        for (int t = 0; t < steps; ++t) h += ',' + band_column(b, t);
    }
    for (int k = 0; k < classes; ++k) h += ",abund_" + std::to_string(k + 1);
    return h;
}

std::string format_dataset_csv(const Dataset& dataset) {
    std::string out = dataset_csv_header(dataset.bands(), dataset.steps(), dataset.classes());
    out += '\n';
    for (const auto& s : dataset.samples()) {
        if (s.pixel_id.find_first_of(",\n\r") != std::string::npos) {
            fail(ErrorKind::Format, "pixel_id '" + s.pixel_id + "' contains a separator");
        }
        out += s.pixel_id;
        out += ',' + std::to_string(s.grid_x) + ',' + std::to_string(s.grid_y);
        for (double a : s.ancillary.values) {
            out += ',';
            io::append_double(out, a);
        }
        for (int b = 0; b < s.series.bands(); ++b) {
            for (int t = 0; t < s.series.steps(); ++t) {
                out += ',';
                if (s.series.mask(t, b) == 1.0) io::append_double(out, s.series.values(t, b));
            }
        }
        for (int k = 0; k < s.reference.classes(); ++k) {
            out += ',';
            io::append_double(out, s.reference.values[k]);
        }
        out += '\n';
    }
    return out;
}

Dataset parse_dataset_csv(std::string_view text) {
    const auto rows = io::lines(text);
    if (rows.empty()) fail(ErrorKind::Format, "dataset CSV has no header");
    const auto header = io::split(rows.front(), ',');
    if (header.size() < kLeadingColumns + 2) fail(ErrorKind::Format, "dataset CSV header is too short");
    if (header[0] != "pixel_id" || header[1] != "grid_x" || header[2] != "grid_y") {
        fail(ErrorKind::Format, "dataset CSV header must start with pixel_id,grid_x,grid_y");
    }
    for (std::size_t j = 0; j < kAncillaryDim; ++j) {
        if (header[3 + j] != kAncillaryColumns[j]) {
            fail(ErrorKind::Format, "expected column '" + std::string(kAncillaryColumns[j]) + "', found '" +
                                        std::string(header[3 + j]) + "'");
        }
    }
    int classes = 0;
    std::size_t band_cols = 0;
    for (std::size_t c = kLeadingColumns; c < header.size(); ++c) {
        if (header[c].starts_with("abund_")) {
            ++classes;
        } else {
            if (classes > 0) fail(ErrorKind::Format, "band column after abundance columns");
            ++band_cols;
        }
    }
    // Infer T from the run of b1_m* columns.
    int steps = 0;
    while (kLeadingColumns + steps < header.size() && header[kLeadingColumns + steps].starts_with("b1_m")) ++steps;
    if (steps == 0 || band_cols % static_cast<std::size_t>(steps) != 0) {
        fail(ErrorKind::Format, "cannot infer the band/month layout from the header");
    }
    const int bands = static_cast<int>(band_cols) / steps;
    if (dataset_csv_header(bands, steps, classes) != rows.front()) {
        fail(ErrorKind::Format, "dataset CSV header does not follow the expected column order");
    }

    std::vector<double> timestamps(static_cast<std::size_t>(steps));
    std::iota(timestamps.begin(), timestamps.end(), 0.0);

    std::vector<Sample> samples;
    samples.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto cells = io::split(rows[r], ',');
        if (cells.size() != header.size()) {
            fail(ErrorKind::Format, "row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(header.size()));
        }
        AncillaryVector anc;
        for (std::size_t j = 0; j < kAncillaryDim; ++j) anc.values[j] = io::parse_double(cells[3 + j]);
        Matrix values = Matrix::Zero(steps, bands), mask = Matrix::Zero(steps, bands);
        std::size_t c = kLeadingColumns;
        for (int b = 0; b < bands; ++b) {
            for (int t = 0; t < steps; ++t, ++c) {
                if (io::trim(cells[c]).empty()) continue;
                values(t, b) = io::parse_double(cells[c]);
                mask(t, b) = 1.0;
            }
        }
        Vector ref(classes);
        for (int k = 0; k < classes; ++k, ++c) ref[k] = io::parse_double(cells[c]);
        const long long gx = io::parse_int(cells[1]);
        const long long gy = io::parse_int(cells[2]);
        samples.push_back(make_sample(values, mask, timestamps, anc, ref, static_cast<int>(gx),
                                      static_cast<int>(gy), std::string(cells[0])));
    }
    return Dataset(std::move(samples), ClassLegend::for_classes(classes).names);
}

void save_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
    io::write_file_atomic(path, format_dataset_csv(dataset));
}

Dataset load_dataset_csv(const std::filesystem::path& path) { return parse_dataset_csv(io::read_file(path)); }

}  // namespace stunmix
