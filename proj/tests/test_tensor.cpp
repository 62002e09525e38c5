#include <doctest.h>

#include <cmath>
#include <set>

#include "grf/rng.hpp"
#include "grf/tensor.hpp"
#include "test_util.hpp"

using namespace grf;
using testutil::bitwise_equal;
using testutil::max_abs_diff;
using testutil::random_tensor;

namespace {

// naive O(n*c*h*w*K^2) cross-correlation with zero padding, f32 accumulation
Tensor naive_conv2d_same(const Tensor& x, const Kernel2d& k) {
    Tensor out(x.shape);
    const int pad = k.size / 2;
    for (int n = 0; n < x.shape.n; ++n) {
        for (int c = 0; c < x.shape.c; ++c) {
            for (int y = 0; y < x.shape.h; ++y) {
                for (int xx = 0; xx < x.shape.w; ++xx) {
                    float s = 0.0f;
                    for (int a = 0; a < k.size; ++a) {
                        for (int b = 0; b < k.size; ++b) {
                            const int sy = y + a - pad;
                            const int sx = xx + b - pad;
                            if (sy < 0 || sy >= x.shape.h || sx < 0 || sx >= x.shape.w) {
                                continue;
                            }
                            s += k.taps[static_cast<size_t>(a) * k.size + b] *
                                 x.at(n, c, sy, sx);
                        }
                    }
                    out.at(n, c, y, xx) = s;
                }
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("sign basic values") {
    Tensor t(Shape{1, 1, 1, 3});
    t.data = {-3.2f, 0.0f, 5.1f};
    const Tensor s = sign(t);
    CHECK(s.data[0] == -1.0f);
    CHECK(s.data[1] == 0.0f);
    CHECK(s.data[2] == 1.0f);
}

TEST_CASE("sign of all zeros is all zeros") {
    const Tensor t(Shape{2, 3, 4, 4});
    const Tensor s = sign(t);
    for (float v : s.data) {
        CHECK(v == 0.0f);
    }
}

TEST_CASE("sign is idempotent on random tensors") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const Tensor t = random_tensor(Shape{2, 3, 5, 5}, rng, -4.0f, 4.0f);
        const Tensor s1 = sign(t);
        const Tensor s2 = sign(s1);
        CHECK(bitwise_equal(s1, s2));
    }
}

TEST_CASE("project_linf saturation and identity") {
    Rng rng(11);
    const Tensor x = random_tensor(Shape{1, 3, 4, 4}, rng, 0.0f, 1.0f);
    const float eps = 16.0f / 255.0f;

    Tensor far(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) {
        far.data[i] = x.data[i] + 0.5f;
    }
    const Tensor proj = project_linf(far, x, eps);
    for (size_t i = 0; i < x.data.size(); ++i) {
        const float expect = std::min(x.data[i] + eps, 1.0f);
        CHECK(proj.data[i] == expect);
    }

    Tensor inside(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) {
        inside.data[i] = std::min(std::max(x.data[i] + 0.01f, 0.0f), 1.0f);
    }
    CHECK(bitwise_equal(project_linf(inside, x, eps), inside));
}

TEST_CASE("project_linf bounds hold for random input") {
    Rng rng(12);
    const Tensor x = random_tensor(Shape{2, 3, 8, 8}, rng, 0.0f, 1.0f);
    const Tensor adv = random_tensor(Shape{2, 3, 8, 8}, rng, -0.5f, 1.5f);
    const Tensor r = project_linf(adv, x, 0.1f);
    for (size_t i = 0; i < r.data.size(); ++i) {
        CHECK(std::fabs(r.data[i] - x.data[i]) <= 0.1f + 1e-7f);
        CHECK(r.data[i] >= 0.0f);
        CHECK(r.data[i] <= 1.0f);
    }
}

TEST_CASE("project_linf is bitwise idempotent") {
    Rng rng(13);
    const Tensor x = random_tensor(Shape{2, 3, 6, 6}, rng, 0.0f, 1.0f);
    const Tensor adv = random_tensor(Shape{2, 3, 6, 6}, rng, -1.0f, 2.0f);
    const Tensor once = project_linf(adv, x, 0.07f);
    const Tensor twice = project_linf(once, x, 0.07f);
    CHECK(bitwise_equal(once, twice));
}

TEST_CASE("project_linf rejects shape mismatch") {
    const Tensor a(Shape{1, 1, 2, 2});
    const Tensor b(Shape{1, 1, 3, 3});
    CHECK_THROWS_AS(project_linf(a, b, 0.1f), std::invalid_argument);
}

TEST_CASE("conv2d_same identity kernels") {
    Rng rng(21);
    const Tensor x = random_tensor(Shape{1, 2, 6, 6}, rng);

    Kernel2d one;
    one.size = 1;
    one.taps = {1.0f};
    CHECK(bitwise_equal(conv2d_same(x, one), x));

    Kernel2d delta;
    delta.size = 3;
    delta.taps.assign(9, 0.0f);
    delta.taps[4] = 1.0f;
    CHECK(bitwise_equal(conv2d_same(x, delta), x));
}

TEST_CASE("conv2d_same matches naive loop oracle") {
    Rng rng(22);
    const Shape shapes[] = {{1, 1, 5, 5}, {2, 3, 8, 8}, {1, 2, 7, 6}, {1, 1, 1, 1}};
    for (const Shape& shape : shapes) {
        for (int ks : {1, 3, 5}) {
            Kernel2d k;
            k.size = ks;
            k.taps.resize(static_cast<size_t>(ks) * ks);
            for (float& v : k.taps) {
                v = rng.next_float() * 2.0f - 1.0f;
            }
            const Tensor x = random_tensor(shape, rng, -2.0f, 2.0f);
            const Tensor got = conv2d_same(x, k);
            const Tensor want = naive_conv2d_same(x, k);
            CHECK(max_abs_diff(got, want) <= 1e-5);
        }
    }
}

TEST_CASE("conv2d_same rejects even kernels") {
    const Tensor x(Shape{1, 1, 4, 4});
    Kernel2d k;
    k.size = 2;
    k.taps.assign(4, 0.25f);
    CHECK_THROWS_AS(conv2d_same(x, k), std::invalid_argument);
}

TEST_CASE("softmax cross-entropy on uniform and confident logits") {
    Tensor logits(Shape{1, 4, 1, 1});
    logits.data = {0.3f, 0.3f, 0.3f, 0.3f};
    const auto uniform = softmax_cross_entropy(logits, {2});
    CHECK(uniform.loss == doctest::Approx(std::log(4.0)).epsilon(1e-6));

    logits.data = {0.0f, 20.0f, 0.0f, 0.0f};
    const auto confident = softmax_cross_entropy(logits, {1});
    CHECK(confident.loss < 1e-6);
}

TEST_CASE("softmax cross-entropy gradient matches finite differences") {
    Rng rng(31);
    Tensor logits = random_tensor(Shape{3, 5, 1, 1}, rng, -2.0f, 2.0f);
    const std::vector<int> labels = {4, 0, 2};
    const auto res = softmax_cross_entropy(logits, labels);
    const double h = 1e-3;
    for (size_t i = 0; i < logits.data.size(); ++i) {
        Tensor up = logits;
        Tensor dn = logits;
        up.data[i] += static_cast<float>(h);
        dn.data[i] -= static_cast<float>(h);
        const double fd = (softmax_cross_entropy(up, labels).loss -
                           softmax_cross_entropy(dn, labels).loss) /
                          (2.0 * h);
        const double g = res.dlogits.data[i];
        const double rel = std::fabs(fd - g) / std::max({std::fabs(fd), std::fabs(g), 1e-8});
        CHECK(rel <= 1e-3);
    }
}

TEST_CASE("softmax cross-entropy rejects bad labels") {
    const Tensor logits(Shape{2, 4, 1, 1});
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {-1, 0}), std::invalid_argument);
}

TEST_CASE("finite in, finite out across public ops") {
    Rng rng(41);
    const Tensor x = random_tensor(Shape{2, 3, 8, 8}, rng, -3.0f, 3.0f);
    const Tensor ref = random_tensor(Shape{2, 3, 8, 8}, rng, 0.0f, 1.0f);
    Kernel2d k;
    k.size = 3;
    k.taps.assign(9, 1.0f / 9.0f);
    CHECK(sign(x).all_finite());
    CHECK(project_linf(x, ref, 0.2f).all_finite());
    CHECK(conv2d_same(x, k).all_finite());
    CHECK(l1_normalize_per_image(x).all_finite());
}

TEST_CASE("l1_normalize_per_image has unit norm and keeps zeros") {
    Rng rng(42);
    Tensor g = random_tensor(Shape{2, 1, 4, 4}, rng, -2.0f, 2.0f);
    // zero out second image entirely
    for (size_t i = g.shape.image_numel(); i < g.data.size(); ++i) {
        g.data[i] = 0.0f;
    }
    const Tensor n = l1_normalize_per_image(g);
    double norm0 = 0.0;
    for (size_t i = 0; i < g.shape.image_numel(); ++i) {
        norm0 += std::fabs(static_cast<double>(n.data[i]));
    }
    CHECK(norm0 == doctest::Approx(1.0).epsilon(1e-6));
    for (size_t i = g.shape.image_numel(); i < n.data.size(); ++i) {
        CHECK(n.data[i] == 0.0f);
    }
}

TEST_CASE("rng: same seed reproduces draws") {
    Rng a(12345);
    Rng b(12345);
    for (int i = 0; i < 10000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("rng: folded streams are replayable and distinct") {
    const Rng base(99);
    Rng s0 = base.fold(0);
    Rng s1 = base.fold(1);
    Rng s0_again = base.fold(0);
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const uint64_t v0 = s0.next_u64();
        CHECK(v0 == s0_again.next_u64());
        any_diff |= (v0 != s1.next_u64());
    }
    CHECK(any_diff);
}

TEST_CASE("rng: uniform_int stays in range and hits all values") {
    Rng rng(5);
    std::set<int> seen;
    for (int i = 0; i < 2000; ++i) {
        const int v = rng.uniform_int(24, 32);
        REQUIRE(v >= 24);
        REQUIRE(v <= 32);
        seen.insert(v);
    }
    CHECK(seen.size() == 9);
}
