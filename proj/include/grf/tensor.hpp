#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace grf {

struct Shape {
    int n = 0;
    int c = 0;
    int h = 0;
    int w = 0;

    size_t numel() const {
        return static_cast<size_t>(n) * c * h * w;
    }
    size_t image_numel() const {
        return static_cast<size_t>(c) * h * w;
    }
    bool operator==(const Shape& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
    bool operator!=(const Shape& o) const { return !(*this == o); }
    std::string str() const;
};

/// Dense 4-D float32 array in row-major (n, c, h, w) order. Values are
/// treated as immutable once an operation has produced them; ops return
/// fresh tensors.
struct Tensor {
    Shape shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), data(s.numel(), 0.0f) {}

    static Tensor zeros(Shape s) { return Tensor(s); }

    float& at(int n, int c, int h, int w) {
        return data[((static_cast<size_t>(n) * shape.c + c) * shape.h + h) * shape.w + w];
    }
    const float& at(int n, int c, int h, int w) const {
        return data[((static_cast<size_t>(n) * shape.c + c) * shape.h + h) * shape.w + w];
    }

    float* image(int n) { return data.data() + static_cast<size_t>(n) * shape.image_numel(); }
    const float* image(int n) const {
        return data.data() + static_cast<size_t>(n) * shape.image_numel();
    }

    size_t size() const { return data.size(); }
    bool all_finite() const;
};

/// Square 2-D convolution kernel of odd size, row-major taps.
struct Kernel2d {
    int size = 1;
    std::vector<float> taps;
};

/// Elementwise sign: -1 for negative, +1 for positive, 0 for exact zero.
Tensor sign(const Tensor& x);

/// Clamp x_adv into the L-inf band of radius eps around x_orig, then into
/// [0, 1]. Idempotent; entries already satisfying both constraints pass
/// through unchanged.
Tensor project_linf(const Tensor& x_adv, const Tensor& x_orig, float eps);

/// Depthwise same-size convolution of every (n, c) plane with a single odd
/// 2-D kernel. Cross-correlation orientation, zero padding.
Tensor conv2d_same(const Tensor& x, const Kernel2d& kernel);

struct SoftmaxCeResult {
    double loss = 0.0;  // mean over batch, accumulated in f64
    Tensor dlogits;     // exact gradient of the mean loss w.r.t. logits
};

/// Mean softmax cross-entropy over the batch. Logits must have shape
/// (n, classes, 1, 1); labels must lie in [0, classes).
SoftmaxCeResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

/// Per-image L1 normalization g / ||g||_1 with the convention 0/0 := 0.
/// Norms accumulate in f64; each element is divided in f64 and cast back.
Tensor l1_normalize_per_image(const Tensor& g);

} // namespace grf
