#include "stunmix/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"
#include "stunmix/random.hpp"

namespace stunmix::synth {

namespace {

constexpr std::uint64_t kEndmemberStream = 0x454d;
constexpr std::uint64_t kAbundanceStream = 0x4142;
constexpr std::uint64_t kSeriesStream = 0x5345;
constexpr std::uint64_t kAncillaryStream = 0x414e;
constexpr std::uint64_t kAncillaryWeightStream = 0x4157;
constexpr int kMaxResample = 100;

// Plausible physical ranges for the nine covariates (offset, scale).
constexpr std::array<std::pair<double, double>, kAncillaryDim> kAncillaryScale = {{
    {-5.0, 1.0},
    {37.5, 0.5},
    {600.0, 300.0},
    {8.0, 4.0},
    {550.0, 150.0},
    {1000.0, 150.0},
    {16.0, 2.0},
    {23.0, 2.0},
    {10.0, 2.0},
}};

bool pairwise_distinct(const EndmemberSet& set) {
    for (std::size_t a = 0; a < set.signatures.size(); ++a) {
        for (std::size_t b = a + 1; b < set.signatures.size(); ++b) {
            if ((set.signatures[a] - set.signatures[b]).norm() <= 1e-6) return false;
        }
    }
    return true;
}

Vector dirichlet(int classes, double alpha, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    Vector a(classes);
    for (int k = 0; k < classes; ++k) a[k] = gamma(rng);
    const double s = a.sum();
    if (!(s > 0.0) || !std::isfinite(s)) return Vector::Constant(classes, 1.0 / classes);
    return a / s;
}

// Mean over the in-bounds (2r+1)^2 neighborhood, then renormalized.
std::vector<Vector> smooth(const std::vector<Vector>& field, int width, int height, int radius) {
    if (radius <= 0) return field;
    std::vector<Vector> out(field.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            Vector acc = Vector::Zero(field.front().size());
            for (int yy = std::max(0, y - radius); yy <= std::min(height - 1, y + radius); ++yy) {
                for (int xx = std::max(0, x - radius); xx <= std::min(width - 1, x + radius); ++xx) {
                    acc += field[static_cast<std::size_t>(yy * width + xx)];
                }
            }
            out[static_cast<std::size_t>(y * width + x)] = acc / acc.sum();
        }
    }
    return out;
}

}  // namespace

EndmemberSet gen_endmembers(int classes, int steps, int bands, std::uint64_t seed, double amplitude_scale) {
    if (classes < 1 || steps < 1 || bands < 1) fail(ErrorKind::InvalidArgument, "K, T and B must be at least 1");
    EndmemberSet set;
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        auto rng = derive_rng(seed, kEndmemberStream, static_cast<std::uint64_t>(attempt));
        std::uniform_real_distribution<double> base(0.05, 0.45), amp(0.02, 0.15), phase(0.0, 2.0 * std::numbers::pi);
        set.signatures.clear();
        for (int k = 0; k < classes; ++k) {
            Vector b(bands), a(bands);
            for (int j = 0; j < bands; ++j) {
                b[j] = base(rng);
                a[j] = amp(rng) * amplitude_scale;
            }
            const double ph = phase(rng);
            Matrix sig(steps, bands);
            for (int t = 0; t < steps; ++t) {
                const double s = std::sin(2.0 * std::numbers::pi * t / steps + ph);
                for (int j = 0; j < bands; ++j) sig(t, j) = b[j] + a[j] * s;
            }
            set.signatures.push_back(std::move(sig));
        }
        if (pairwise_distinct(set)) return set;
    }
    fail(ErrorKind::InvalidArgument, "could not draw pairwise-distinct endmembers");
}

Matrix mix(const EndmemberSet& endmembers, const Vector& abundances, double noise_sigma, std::mt19937_64& rng) {
    if (endmembers.signatures.empty()) fail(ErrorKind::InvalidArgument, "empty endmember set");
    if (abundances.size() != endmembers.classes()) {
        fail(ErrorKind::ShapeMismatch, "abundance vector has " + std::to_string(abundances.size()) +
                                           " entries for " + std::to_string(endmembers.classes()) + " endmembers");
    }
    validate_abundance(abundances);
    const Matrix& first = endmembers.signatures.front();
    Matrix out = Matrix::Zero(first.rows(), first.cols());
    for (int k = 0; k < endmembers.classes(); ++k) out += abundances[k] * endmembers.signatures[static_cast<std::size_t>(k)];
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) += noise(rng);
        }
    }
    return out;
}

Scene gen_scene(const SceneConfig& config) {
    config.validate();
    const int K = config.classes, T = config.steps, B = config.bands;
    const std::size_t n = static_cast<std::size_t>(config.width) * static_cast<std::size_t>(config.height);

    Scene scene;
    scene.endmembers = gen_endmembers(K, T, B, config.seed, config.amplitude_scale);

    std::vector<Vector> field(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = derive_rng(config.seed, kAbundanceStream, i);
        field[i] = dirichlet(K, config.dirichlet_alpha, rng);
    }
    field = smooth(field, config.width, config.height, config.smoothing_radius);

    Matrix anc_w(static_cast<Eigen::Index>(kAncillaryDim), K);
    {
        auto rng = derive_rng(config.seed, kAncillaryWeightStream);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index j = 0; j < anc_w.rows(); ++j) {
            for (int k = 0; k < K; ++k) anc_w(j, k) = normal(rng);
        }
    }

    std::vector<double> timestamps(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) timestamps[static_cast<std::size_t>(t)] = t;

    std::vector<Sample> samples;
    samples.reserve(n);
    for (int y = 0; y < config.height; ++y) {
        for (int x = 0; x < config.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y * config.width + x);
            const Vector& a = field[i];

            auto series_rng = derive_rng(config.seed, kSeriesStream, i);
            Matrix values = mix(scene.endmembers, a, config.noise_sigma, series_rng);
            Matrix mask(T, B);
            std::bernoulli_distribution observed(1.0 - config.missing_rate);
            for (int b = 0; b < B; ++b) {
                for (int t = 0; t < T; ++t) mask(t, b) = observed(series_rng) ? 1.0 : 0.0;
            }

            auto anc_rng = derive_rng(config.seed, kAncillaryStream, i);
            std::normal_distribution<double> normal(0.0, 1.0);
            AncillaryVector anc;
            const Vector signal = anc_w * a;
            for (std::size_t j = 0; j < kAncillaryDim; ++j) {
                const double eps = normal(anc_rng);
                const double raw = config.ancillary_informative
                                       ? signal[static_cast<Eigen::Index>(j)] + config.ancillary_noise * eps
                                       : eps;
                anc.values[j] = kAncillaryScale[j].first + kAncillaryScale[j].second * raw;
            }

            samples.push_back(make_sample(values, mask, timestamps, anc, a, x, y,
                                          "px_" + std::to_string(x) + "_" + std::to_string(y)));
        }
    }
    scene.dataset = Dataset(std::move(samples), ClassLegend::for_classes(K).names);
    return scene;
}

std::string format_endmembers(const EndmemberSet& endmembers) {
    if (endmembers.signatures.empty()) return "0 0 0\n";
    const Matrix& first = endmembers.signatures.front();
    std::string out = std::to_string(endmembers.classes()) + ' ' + std::to_string(first.rows()) + ' ' +
                      std::to_string(first.cols()) + '\n';
    for (const Matrix& sig : endmembers.signatures) {
        for (Eigen::Index t = 0; t < sig.rows(); ++t) {
            for (Eigen::Index b = 0; b < sig.cols(); ++b) {
                if (b > 0) out += ' ';
                io::append_double(out, sig(t, b));
            }
            out += '\n';
        }
    }
    return out;
}

EndmemberSet parse_endmembers(std::string_view text) {
    const auto rows = io::lines(text);
    if (rows.empty()) fail(ErrorKind::Format, "empty endmember file");
    const auto head = io::split(io::trim(rows[0]), ' ');
    if (head.size() != 3) fail(ErrorKind::Format, "endmember header must be 'K T B'");
    const long long K = io::parse_int(head[0]), T = io::parse_int(head[1]), B = io::parse_int(head[2]);
    if (K < 0 || T < 0 || B < 0) fail(ErrorKind::Format, "negative endmember dimensions");
    if (static_cast<long long>(rows.size()) - 1 < K * T) fail(ErrorKind::Format, "endmember file is truncated");
    EndmemberSet set;
    std::size_t line = 1;
    for (long long k = 0; k < K; ++k) {
        Matrix sig(T, B);
        for (long long t = 0; t < T; ++t, ++line) {
            const auto cells = io::split(io::trim(rows[line]), ' ');
            if (static_cast<long long>(cells.size()) != B) {
                fail(ErrorKind::Format, "endmember line " + std::to_string(line + 1) + " has " +
                                            std::to_string(cells.size()) + " values, expected " + std::to_string(B));
            }
            for (long long b = 0; b < B; ++b) sig(t, b) = io::parse_double(cells[static_cast<std::size_t>(b)]);
        }
        set.signatures.push_back(std::move(sig));
    }
    return set;
}

}  // namespace stunmix::synth
