#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "stunmix/error.hpp"
#include "stunmix/trainer.hpp"
#include "stunmix/unmixer.hpp"

using namespace stunmix;

namespace {

ModelConfig small_config(AncillaryUse use = AncillaryUse::Both, int K = 3) {
    ModelConfig c;
    c.steps = 4;
    c.bands = 3;
    c.hidden = 5;
    c.anc_hidden = 2;
    c.classes = K;
    c.use_ancillary = use;
    return c;
}

std::vector<Sample> random_samples(const ModelConfig& c, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0, 1);
    std::bernoulli_distribution obs(0.8);
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        Matrix v(c.steps, c.bands), m(c.steps, c.bands);
        for (int t = 0; t < c.steps; ++t) {
            for (int b = 0; b < c.bands; ++b) {
                v(t, b) = normal(rng);
                m(t, b) = obs(rng) ? 1.0 : 0.0;
            }
        }
        AncillaryVector anc;
        for (auto& a : anc.values) a = normal(rng);
        Vector ref = Vector::Zero(c.classes);
        ref[i % c.classes] = 0.6;
        ref[(i + 1) % c.classes] += 0.4;
        std::vector<double> ts;
        for (int t = 0; t < c.steps; ++t) ts.push_back(t);
        out.push_back(make_sample(v, m, ts, anc, ref, i, 0));
    }
    return out;
}

std::vector<const Sample*> ptrs(const std::vector<Sample>& s) {
    std::vector<const Sample*> p;
    for (const auto& x : s) p.push_back(&x);
    return p;
}

}  // namespace

TEST(Softmax, DocumentedExamples) {
    EXPECT_TRUE((softmax(Vector::Zero(4)).values.array() == 0.25).all());
    Vector l(4);
    l << std::log(1.0), std::log(2.0), std::log(3.0), std::log(4.0);
    const Vector a = softmax(l).values;
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], 0.1 * (k + 1), 1e-15);
    const Vector shifted = softmax((l.array() + 7.0).matrix()).values;
    EXPECT_LT((shifted - a).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Softmax, ExtremeLogitsStayOnSimplex) {
    Vector l(3);
    l << 1000.0, -1000.0, 999.0;
    const Vector a = softmax(l).values;
    EXPECT_TRUE(a.allFinite());
    EXPECT_NEAR(a.sum(), 1.0, 1e-15);
    EXPECT_GE(a.minCoeff(), 0.0);
    l[1] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(softmax(l), Error);
}

TEST(AncillaryBranch, DocumentedExamples) {
    ModelConfig c = small_config();
    c.anc_hidden = 2;
    UnmixerParams p = UnmixerParams::zeros(c);
    ASSERT_EQ(p.anc_w.rows(), 2);
    ASSERT_EQ(p.anc_w.cols(), 9);
    AncillaryVector anc;
    anc.values[0] = 1.0;
    EXPECT_TRUE((ancillary_branch(anc, p).array() == 0.0).all());  // null map
    p.anc_b << 3.0, 0.0;
    EXPECT_EQ(ancillary_branch(AncillaryVector{}, p)[0], 3.0);  // bias passthrough
    p.anc_b.setZero();
    p.anc_w(0, 0) = -1.0;
    p.anc_w(1, 0) = 2.0;
    const Vector h = ancillary_branch(anc, p);
    EXPECT_EQ(h[0], 0.0);
    EXPECT_EQ(h[1], 2.0);
}

TEST(AncillaryBranch, RoutesOnlyTheSelectedGroup) {
    for (AncillaryUse use : {AncillaryUse::Geo, AncillaryUse::Clim}) {
        UnmixerParams p = init_params(1, small_config(use));
        p.anc_b.setConstant(5.0);  // keep the ReLU active
        AncillaryVector anc;
        const Vector base = ancillary_branch(anc, p);
        const auto [b, e] = p.config.ancillary_range();
        for (std::size_t j = 0; j < kAncillaryDim; ++j) {
            AncillaryVector moved = anc;
            moved.values[j] = 0.3;
            const bool inside = j >= b && j < e;
            EXPECT_EQ(ancillary_branch(moved, p) != base, inside) << "feature " << j;
        }
    }
}

TEST(Forward, NoAncillaryIgnoresAncillaryValues) {
    const ModelConfig c = small_config(AncillaryUse::None);
    const UnmixerParams p = init_params(2, c);
    EXPECT_EQ(p.anc_w.size(), 0);
    auto samples = random_samples(c, 1, 3);
    const Vector a = forward(samples[0], p).first.abundances.values;
    samples[0].ancillary.values.fill(42.0);
    EXPECT_EQ(forward(samples[0], p).first.abundances.values, a);
}

TEST(Forward, ZeroHeadGivesUniform) {
    const ModelConfig c = small_config();
    UnmixerParams p = init_params(3, c);
    p.head_w.setZero();
    p.head_b.setZero();
    const auto samples = random_samples(c, 1, 4);
    EXPECT_TRUE((forward(samples[0], p).first.abundances.values.array() == 1.0 / 3.0).all());
}

TEST(Forward, TenClassLegend) {
    const ModelConfig c = small_config(AncillaryUse::Both, 10);
    const UnmixerParams p = init_params(4, c);
    const auto samples = random_samples(c, 1, 5);
    const Vector a = forward(samples[0], p).first.abundances.values;
    EXPECT_EQ(a.size(), 10);
    EXPECT_NEAR(a.sum(), 1.0, 1e-12);
}

TEST(Loss, DocumentedExamples) {
    Prediction pred;
    pred.abundances.values = (Vector(4) << 0.5, 0.5, 0, 0).finished();
    AbundanceVector ref{(Vector(4) << 1, 0, 0, 0).finished()};
    BritsOutput b;
    b.imp_loss_fwd = 2.0;
    b.imp_loss_bwd = 4.0;
    b.cons_loss = 1.0;
    EXPECT_DOUBLE_EQ(loss(std::span(&pred, 1), std::span(&ref, 1), std::span(&b, 1), LossWeights{1, 0, 0}), 0.5);
    EXPECT_DOUBLE_EQ(loss(std::span(&pred, 1), std::span(&ref, 1), std::span(&b, 1), LossWeights{1, 0.1, 0.2}),
                     0.5 + 0.1 * 3.0 + 0.2);
    Prediction exact;
    exact.abundances = ref;
    EXPECT_EQ(loss(std::span(&exact, 1), std::span(&ref, 1), std::span(&b, 1), LossWeights{1, 0, 0}), 0.0);
}

TEST(Loss, DuplicatingTheBatchLeavesTheMeanUnchanged) {
    const ModelConfig c = small_config();
    const UnmixerParams p = init_params(5, c);
    auto samples = random_samples(c, 5, 6);
    const double once = batch_loss_and_gradient(ptrs(samples), p, nullptr);
    const auto copy = samples;
    samples.insert(samples.end(), copy.begin(), copy.end());
    EXPECT_NEAR(batch_loss_and_gradient(ptrs(samples), p, nullptr), once, 1e-14);
}

TEST(Batch, LossMatchesPerSampleForward) {
    const ModelConfig c = small_config();
    const UnmixerParams p = init_params(6, c);
    const auto samples = random_samples(c, 7, 7);
    std::vector<Prediction> preds;
    std::vector<AbundanceVector> refs;
    std::vector<BritsOutput> outs;
    for (const auto& s : samples) {
        auto [pred, out] = forward(s, p);
        preds.push_back(pred);
        refs.push_back(s.reference);
        outs.push_back(out);
    }
    EXPECT_NEAR(batch_loss_and_gradient(ptrs(samples), p, nullptr), loss(preds, refs, outs, p), 1e-13);
    const Matrix a = predict_abundances(ptrs(samples), p);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_LT((a.col(static_cast<Eigen::Index>(i)) - preds[i].abundances.values).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Batch, ThreadCountDoesNotChangeBits) {
    const ModelConfig c = small_config();
    const UnmixerParams p = init_params(7, c);
    const auto samples = random_samples(c, 600, 8);  // spans several chunks
    UnmixerParams g1, g3;
    const double l1 = batch_loss_and_gradient(ptrs(samples), p, &g1, 1);
    const double l3 = batch_loss_and_gradient(ptrs(samples), p, &g3, 3);
    EXPECT_EQ(l1, l3);
    const auto t1 = named_tensors(g1), t3 = named_tensors(g3);
    ASSERT_EQ(t1.size(), t3.size());
    for (std::size_t i = 0; i < t1.size(); ++i) EXPECT_EQ(*t1[i].value, *t3[i].value) << t1[i].name;
}

TEST(Params, ShapesFollowConfig) {
    const ModelConfig c = small_config(AncillaryUse::Clim);
    const UnmixerParams p = UnmixerParams::zeros(c);
    EXPECT_EQ(p.anc_w.cols(), 5);
    EXPECT_EQ(p.head_w.cols(), 2 * c.hidden + c.anc_hidden);
    EXPECT_EQ(p.brits.fwd.w_i.cols(), 2 * c.bands + c.hidden);
    EXPECT_EQ(p.brits.fwd.w_beta.cols(), 2 * c.bands);
    std::size_t n = 0;
    for (const auto& t : named_tensors(p)) n += static_cast<std::size_t>(t.value->size());
    EXPECT_EQ(p.scalar_count(), n);
    EXPECT_TRUE(is_feature_regression("brits.bwd.w_z"));
    EXPECT_FALSE(is_feature_regression("brits.bwd.b_z"));
}
