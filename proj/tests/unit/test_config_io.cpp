#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "stunmix/config.hpp"
#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

using namespace stunmix;
namespace fs = std::filesystem;

namespace {

std::string error_message(const std::function<void()>& fn, ErrorKind expected) {
    try {
        fn();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), expected) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "expected an error";
    return {};
}

}  // namespace

TEST(Io, DoubleRoundTripIsExact) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(io::parse_double(io::format_double(v)), v);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Io, ParseRejectsGarbage) {
    error_message([] { io::parse_double("1.5x"); }, ErrorKind::Format);
    error_message([] { io::parse_int("12.0"); }, ErrorKind::Format);
    EXPECT_EQ(io::parse_int(" 42 "), 42);
}

TEST(Io, SplitTrimLines) {
    const auto parts = io::split("a,,b", ',');
    ASSERT_EQ(parts.size(), 3u);
    EXPECT_EQ(parts[1], "");
    EXPECT_EQ(io::trim("  x \t"), "x");
    const auto rows = io::lines("one\r\ntwo\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "one");
    EXPECT_EQ(rows[1], "two");
}

TEST(Io, AtomicWriteLeavesNoTemporary) {
    const fs::path dir = fs::temp_directory_path() / "stunmix_io_test";
    fs::create_directories(dir);
    const fs::path p = dir / "out.txt";
    io::write_file_atomic(p, "first");
    io::write_file_atomic(p, "second");
    EXPECT_EQ(io::read_file(p), "second");
    for (const auto& entry : fs::directory_iterator(dir)) EXPECT_EQ(entry.path().filename(), "out.txt");
    fs::remove_all(dir);
    error_message([&] { io::read_file(dir / "missing"); }, ErrorKind::Io);
}

TEST(Config, DefaultValues) {
    const TrainConfig t;
    EXPECT_EQ(t.epochs, 200);
    EXPECT_EQ(t.batch_size, 2048);
    EXPECT_EQ(t.lr0, 0.003);
    const SceneConfig s;
    EXPECT_EQ(s.dirichlet_alpha, 0.5);
    EXPECT_EQ(s.noise_sigma, 0.02);
    EXPECT_EQ(s.missing_rate, 0.15);
}

TEST(Config, ParsesKeysAndComments) {
    const ModelConfig m = parse_model_config("# comment\nH = 16\nuse_ancillary = geo  # trailing\nλ_imp = 0.5\n");
    EXPECT_EQ(m.hidden, 16);
    EXPECT_EQ(m.use_ancillary, AncillaryUse::Geo);
    EXPECT_EQ(m.lambda_imp, 0.5);
    EXPECT_EQ(m.ancillary_inputs(), 4);
    EXPECT_EQ(m.head_inputs(), 2 * 16 + m.anc_hidden);
}

TEST(Config, UnknownKeyNamesTheKey) {
    const std::string msg = error_message([] { parse_train_config("epochs = 3\nbogus_key = 1\n"); },
                                          ErrorKind::InvalidConfig);
    EXPECT_NE(msg.find("bogus_key"), std::string::npos);
}

TEST(Config, BadValueNamesTheKey) {
    const std::string msg = error_message([] { parse_scene_config("width = wide\n"); }, ErrorKind::InvalidConfig);
    EXPECT_NE(msg.find("width"), std::string::npos);
}

TEST(Config, InvariantsEnforced) {
    error_message([] { parse_train_config("epochs = 0\n"); }, ErrorKind::InvalidConfig);
    error_message([] { parse_scene_config("missing_rate = 1\n"); }, ErrorKind::InvalidConfig);
    error_message([] { parse_model_config("use_ancillary = maybe\n"); }, ErrorKind::InvalidConfig);
}

TEST(Config, BaseValuesSurviveAbsentKeys) {
    ModelConfig base;
    base.hidden = 3;
    base.classes = 7;
    const ModelConfig m = parse_model_config("A = 2\n", base);
    EXPECT_EQ(m.hidden, 3);
    EXPECT_EQ(m.classes, 7);
    EXPECT_EQ(m.anc_hidden, 2);
}

TEST(Config, FormatParseRoundTrip) {
    ModelConfig m;
    m.hidden = 5;
    m.use_ancillary = AncillaryUse::Clim;
    m.hidden_decay = true;
    const ModelConfig m2 = parse_model_config(format_model_config(m));
    EXPECT_EQ(format_model_config(m2), format_model_config(m));
    EXPECT_EQ(m2.ancillary_range().first, 4u);
    EXPECT_EQ(m2.ancillary_range().second, 9u);

    TrainConfig t;
    t.seed = 123456789012345ull;
    t.lr0 = 0.0123;
    EXPECT_EQ(format_train_config(parse_train_config(format_train_config(t))), format_train_config(t));

    SceneConfig s;
    s.ancillary_informative = false;
    s.seed = 9;
    EXPECT_EQ(format_scene_config(parse_scene_config(format_scene_config(s))), format_scene_config(s));
}

TEST(Config, AncillaryUseNames) {
    for (AncillaryUse u : {AncillaryUse::None, AncillaryUse::Geo, AncillaryUse::Clim, AncillaryUse::Both}) {
        EXPECT_EQ(parse_ancillary_use(to_string(u)), u);
    }
    ModelConfig none;
    none.use_ancillary = AncillaryUse::None;
    EXPECT_EQ(none.ancillary_inputs(), 0);
    EXPECT_EQ(none.head_inputs(), 2 * none.hidden);
}
