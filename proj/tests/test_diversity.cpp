#include <doctest.h>

#include <cmath>
#include <vector>

#include "grf/diversity.hpp"
#include "grf/model.hpp"
#include "grf/rng.hpp"
#include "reference_net.hpp"
#include "test_util.hpp"

using namespace grf;
using testutil::bitwise_equal;
using testutil::random_tensor;

TEST_CASE("sample_transform: p=0 always yields identity") {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const TransformRecord rec = sample_transform(0.0f, 32, 32, rng);
        CHECK(!rec.applied);
        CHECK(rec.resize_h == 32);
        CHECK(rec.pad_top == 0);
    }
}

TEST_CASE("sample_transform: p=1 bounds and rough uniformity") {
    Rng rng(2);
    std::vector<int> counts(9, 0);
    for (int i = 0; i < 10000; ++i) {
        const TransformRecord rec = sample_transform(1.0f, 32, 32, rng);
        REQUIRE(rec.applied);
        REQUIRE(rec.resize_h >= 24);
        REQUIRE(rec.resize_h <= 32);
        REQUIRE(rec.resize_w >= 24);
        REQUIRE(rec.resize_w <= 32);
        REQUIRE(rec.pad_top >= 0);
        REQUIRE(rec.pad_top + rec.resize_h <= 32);
        REQUIRE(rec.pad_left + rec.resize_w <= 32);
        counts[rec.resize_h - 24]++;
    }
    // 9 values, expected 1111 each; +-5 sigma ~ 157
    for (int c : counts) {
        CHECK(c > 950);
        CHECK(c < 1270);
    }
}

TEST_CASE("sample_transform: applied fraction tracks p=0.7") {
    Rng rng(3);
    int applied = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        applied += sample_transform(0.7f, 32, 32, rng).applied ? 1 : 0;
    }
    const double frac = static_cast<double>(applied) / draws;
    CHECK(frac > 0.69);
    CHECK(frac < 0.71);
}

TEST_CASE("sample_transform: fixed stream replays bitwise") {
    const Rng base(77);
    Rng a = base.fold(5);
    Rng b = base.fold(5);
    for (int i = 0; i < 50; ++i) {
        const TransformRecord ra = sample_transform(0.7f, 32, 32, a);
        const TransformRecord rb = sample_transform(0.7f, 32, 32, b);
        CHECK(ra.applied == rb.applied);
        CHECK(ra.resize_h == rb.resize_h);
        CHECK(ra.resize_w == rb.resize_w);
        CHECK(ra.pad_top == rb.pad_top);
        CHECK(ra.pad_left == rb.pad_left);
    }
}

TEST_CASE("apply_transform: identity record is a bitwise no-op") {
    Rng rng(4);
    const Tensor x = random_tensor(Shape{2, 3, 16, 16}, rng, 0.0f, 1.0f);
    CHECK(bitwise_equal(apply_transform(x, TransformRecord::identity(16, 16)), x));
}

TEST_CASE("apply_transform: constant image lands as constant block") {
    Tensor x(Shape{1, 1, 32, 32});
    std::fill(x.data.begin(), x.data.end(), 0.625f);
    TransformRecord rec;
    rec.applied = true;
    rec.orig_h = rec.orig_w = 32;
    rec.resize_h = rec.resize_w = 16;
    rec.pad_top = 5;
    rec.pad_left = 9;
    const Tensor y = apply_transform(x, rec);
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            const bool in_block = i >= 5 && i < 21 && j >= 9 && j < 25;
            CHECK(y.at(0, 0, i, j) == (in_block ? 0.625f : 0.0f));
        }
    }
}

TEST_CASE("apply_transform: every output pixel is zero or a copied input pixel") {
    Rng rng(5);
    const Tensor x = random_tensor(Shape{1, 2, 24, 24}, rng, 0.1f, 1.0f);
    for (int trial = 0; trial < 20; ++trial) {
        const TransformRecord rec = sample_transform(1.0f, 24, 24, rng);
        const Tensor y = apply_transform(x, rec);
        for (int c = 0; c < 2; ++c) {
            for (int i = 0; i < 24; ++i) {
                for (int j = 0; j < 24; ++j) {
                    const float v = y.at(0, c, i, j);
                    if (v == 0.0f) {
                        continue;  // pad (inputs are >= 0.1 so zero means pad)
                    }
                    bool found = false;
                    for (int si = 0; si < 24 && !found; ++si) {
                        for (int sj = 0; sj < 24 && !found; ++sj) {
                            found = x.at(0, c, si, sj) == v;
                        }
                    }
                    CHECK(found);
                }
            }
        }
    }
}

TEST_CASE("apply_transform preserves the value range") {
    Rng rng(6);
    const Tensor x = random_tensor(Shape{1, 3, 20, 20}, rng, -0.5f, 1.5f);
    float lo = 0.0f, hi = 0.0f;
    for (float v : x.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (int trial = 0; trial < 10; ++trial) {
        const TransformRecord rec = sample_transform(1.0f, 20, 20, rng);
        const Tensor y = apply_transform(x, rec);
        for (float v : y.data) {
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
    }
}

TEST_CASE("apply_transform rejects mismatched canvas") {
    const Tensor x(Shape{1, 1, 8, 8});
    CHECK_THROWS_AS(apply_transform(x, TransformRecord::identity(16, 16)),
                    std::invalid_argument);
    CHECK_THROWS_AS(pullback_transform(x, TransformRecord::identity(16, 16)),
                    std::invalid_argument);
}

TEST_CASE("pullback_transform: identity record is a bitwise no-op") {
    Rng rng(7);
    const Tensor g = random_tensor(Shape{1, 3, 16, 16}, rng);
    CHECK(bitwise_equal(pullback_transform(g, TransformRecord::identity(16, 16)), g));
}

TEST_CASE("pullback is the exact adjoint of apply") {
    Rng rng(8);
    for (int trial = 0; trial < 25; ++trial) {
        const TransformRecord rec = sample_transform(0.9f, 16, 16, rng);
        const Tensor x = random_tensor(Shape{2, 3, 16, 16}, rng, -1.0f, 1.0f);
        const Tensor g = random_tensor(Shape{2, 3, 16, 16}, rng, -1.0f, 1.0f);
        const Tensor ax = apply_transform(x, rec);
        const Tensor pg = pullback_transform(g, rec);
        double lhs = 0.0, rhs = 0.0;
        for (size_t i = 0; i < x.data.size(); ++i) {
            lhs += static_cast<double>(ax.data[i]) * g.data[i];
            rhs += static_cast<double>(x.data[i]) * pg.data[i];
        }
        CHECK(std::fabs(lhs - rhs) <= 1e-5 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("gradient through the composed transform matches finite differences") {
    Rng rng(9);
    const Classifier model = make_classifier(ArchId::cnn_a, 4, 3, 16, 16, 31337);
    Tensor x = random_tensor(Shape{1, 3, 16, 16}, rng, 0.05f, 0.95f);
    const std::vector<int> labels = {2};
    Rng rec_rng = rng.fold(1);
    const TransformRecord rec = sample_transform(1.0f, 16, 16, rec_rng);

    const Tensor analytic =
        pullback_transform(input_gradient(model, apply_transform(x, rec), labels), rec);

    auto loss_at = [&](const Tensor& probe) {
        const refnet::DTensor transformed =
            refnet::apply_transform(refnet::from_image(probe, 0), rec);
        return refnet::ce_loss(refnet::logits(model, transformed), labels[0]);
    };
    const double h = 1e-3;
    int checked = 0;
    size_t i = 0;
    while (checked < 10 && i < x.data.size()) {
        if (std::fabs(analytic.data[i]) > 1e-5) {
            Tensor up = x;
            Tensor dn = x;
            up.data[i] += static_cast<float>(h);
            dn.data[i] -= static_cast<float>(h);
            const double fd = (loss_at(up) - loss_at(dn)) / (2.0 * h);
            const double rel = std::fabs(fd - analytic.data[i]) /
                               std::max(std::fabs(fd), static_cast<double>(std::fabs(analytic.data[i])));
            CHECK(rel <= 1e-3);
            ++checked;
        }
        i += 7;  // scattered coordinates
    }
    CHECK(checked == 10);
}
