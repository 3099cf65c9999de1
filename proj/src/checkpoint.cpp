#include "stunmix/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

namespace stunmix {

namespace {

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void str(std::string_view s) {
        u64(s.size());
        out_.append(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    void block(const std::string& name, const Matrix& m) {
        str(name);
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
        }
    }
    std::string take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
    double f64() { return std::bit_cast<double>(get(8)); }
    std::string str() {
        const std::uint64_t n = u64();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::string_view raw(std::size_t n) {
        need(n);
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    Matrix block(const std::string& expected_name) {
        const std::string name = str();
        if (name != expected_name) {
            fail(ErrorKind::Format, "checkpoint block '" + name + "' where '" + expected_name + "' was expected");
        }
        const std::uint64_t rows = u64(), cols = u64();
        if (rows > (1u << 24) || cols > (1u << 24)) fail(ErrorKind::Format, "implausible block shape");
        need(rows * cols * 8);
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
        }
        return m;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::uint64_t n) const {
        if (n > in_.size() - pos_) fail(ErrorKind::Format, "checkpoint is truncated");
    }
    std::uint64_t get(int bytes) {
        need(static_cast<std::uint64_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        }
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

double encode_optional(const std::optional<double>& v) {
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> decode_optional(double v) {
    if (std::isnan(v)) return std::nullopt;
    return v;
}

Matrix row_vector(const std::array<double, kAncillaryDim>& a) {
    Matrix m(1, static_cast<Eigen::Index>(kAncillaryDim));
    for (std::size_t j = 0; j < kAncillaryDim; ++j) m(0, static_cast<Eigen::Index>(j)) = a[j];
    return m;
}

std::array<double, kAncillaryDim> to_array(const Matrix& m) {
    if (m.size() != static_cast<Eigen::Index>(kAncillaryDim)) fail(ErrorKind::Format, "bad ancillary statistics");
    std::array<double, kAncillaryDim> a{};
    for (std::size_t j = 0; j < kAncillaryDim; ++j) a[j] = m(0, static_cast<Eigen::Index>(j));
    return a;
}

void expect_shape(const Matrix& got, const Matrix& want, const std::string& name) {
    if (got.rows() != want.rows() || got.cols() != want.cols()) {
        fail(ErrorKind::Format, "checkpoint block '" + name + "' has the wrong shape for the model configuration");
    }
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
    const TrainState& st = ckpt.state;
    Writer w;
    w.raw(kCheckpointMagic);
    w.u32(kCheckpointVersion);
    w.str(format_model_config(st.params.config));
    w.str(format_train_config(ckpt.train));

    const auto tensors = named_tensors(st.params);
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) w.block(t.name, *t.value);

    w.u32(4);
    w.block("norm.band_mean", st.norm.band_mean);
    w.block("norm.band_std", st.norm.band_std);
    w.block("norm.anc_mean", row_vector(st.norm.anc_mean));
    w.block("norm.anc_std", row_vector(st.norm.anc_std));

    if (st.adam.m.size() != tensors.size() || st.adam.v.size() != tensors.size()) {
        fail(ErrorKind::InvalidArgument, "optimizer state does not match the parameters");
    }
    w.i64(st.adam.step);
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        w.block("adam.m." + tensors[i].name, st.adam.m[i]);
        w.block("adam.v." + tensors[i].name, st.adam.v[i]);
    }
    w.i64(st.epochs_done);

    w.u32(static_cast<std::uint32_t>(st.history.size()));
    for (const auto& r : st.history) {
        w.i64(r.epoch);
        w.f64(r.lr);
        w.f64(r.train_loss);
        for (const auto* v : {&r.test_mae, &r.test_rmse, &r.test_rrmse, &r.test_cc, &r.test_f1}) {
            w.f64(encode_optional(*v));
        }
        w.f64(0.0);  // reserved
    }
    return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    Reader r(bytes);
    if (r.raw(kCheckpointMagic.size()) != kCheckpointMagic) fail(ErrorKind::Format, "not a checkpoint file");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        fail(ErrorKind::Format, "unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    const ModelConfig model = parse_model_config(r.str());
    ckpt.train = parse_train_config(r.str());

    TrainState& st = ckpt.state;
    st.params = UnmixerParams::zeros(model);
    auto tensors = named_tensors(st.params);
    if (r.u32() != tensors.size()) fail(ErrorKind::Format, "parameter count differs from the model configuration");
    for (auto& t : tensors) {
        Matrix m = r.block(t.name);
        expect_shape(m, *t.value, t.name);
        *t.value = std::move(m);
    }

    if (r.u32() != 4) fail(ErrorKind::Format, "expected 4 normalization blocks");
    st.norm.band_mean = r.block("norm.band_mean").reshaped();
    st.norm.band_std = r.block("norm.band_std").reshaped();
    st.norm.anc_mean = to_array(r.block("norm.anc_mean"));
    st.norm.anc_std = to_array(r.block("norm.anc_std"));

    st.adam.step = r.i64();
    if (r.u32() != tensors.size()) fail(ErrorKind::Format, "optimizer state count differs from the parameters");
    for (const auto& t : tensors) {
        st.adam.m.push_back(r.block("adam.m." + t.name));
        st.adam.v.push_back(r.block("adam.v." + t.name));
        expect_shape(st.adam.m.back(), *t.value, "adam.m." + t.name);
        expect_shape(st.adam.v.back(), *t.value, "adam.v." + t.name);
    }
    st.epochs_done = static_cast<int>(r.i64());

    const std::uint32_t rows = r.u32();
    for (std::uint32_t i = 0; i < rows; ++i) {
        HistoryRow row;
        row.epoch = static_cast<int>(r.i64());
        row.lr = r.f64();
        row.train_loss = r.f64();
        for (auto* v : {&row.test_mae, &row.test_rmse, &row.test_rrmse, &row.test_cc, &row.test_f1}) {
            *v = decode_optional(r.f64());
        }
        r.f64();
        st.history.push_back(row);
    }
    if (!r.done()) fail(ErrorKind::Format, "trailing bytes after checkpoint");
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    io::write_file_atomic(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

}  // namespace stunmix
