#include "grf/diversity.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace grf {

namespace {

void check_dims(const Tensor& t, const TransformRecord& rec, const char* who) {
    if (t.shape.h != rec.orig_h || t.shape.w != rec.orig_w) {
        throw std::invalid_argument(std::string(who) + ": tensor dims " + t.shape.str() +
                                    " do not match record canvas " +
                                    std::to_string(rec.orig_h) + "x" +
                                    std::to_string(rec.orig_w));
    }
}

// nearest-neighbor source index for output pixel i of `dst` samples from `src`
inline int nn_source(int i, int dst, int src) {
    const int s = static_cast<int>((i + 0.5) * static_cast<double>(src) / dst);
    return s < src ? s : src - 1;
}

} // namespace

TransformRecord sample_transform(float p, int h, int w, Rng& rng) {
    if (!(p >= 0.0f && p <= 1.0f)) {
        throw std::invalid_argument("sample_transform: p must lie in [0,1]");
    }
    if (!rng.bernoulli(p)) {
        return TransformRecord::identity(h, w);
    }
    TransformRecord rec;
    rec.applied = true;
    rec.orig_h = h;
    rec.orig_w = w;
    const int min_h = static_cast<int>(std::ceil(0.75 * h));
    const int min_w = static_cast<int>(std::ceil(0.75 * w));
    rec.resize_h = rng.uniform_int(min_h, h);
    rec.resize_w = rng.uniform_int(min_w, w);
    rec.pad_top = rng.uniform_int(0, h - rec.resize_h);
    rec.pad_left = rng.uniform_int(0, w - rec.resize_w);
    return rec;
}

Tensor apply_transform(const Tensor& x, const TransformRecord& rec) {
    check_dims(x, rec, "apply_transform");
    if (!rec.applied) {
        return x;
    }
    const int h = rec.orig_h;
    const int w = rec.orig_w;
    std::vector<int> src_y(rec.resize_h);
    std::vector<int> src_x(rec.resize_w);
    for (int i = 0; i < rec.resize_h; ++i) {
        src_y[i] = nn_source(i, rec.resize_h, h);
    }
    for (int j = 0; j < rec.resize_w; ++j) {
        src_x[j] = nn_source(j, rec.resize_w, w);
    }
    Tensor out(x.shape);  // zero canvas
    for (int n = 0; n < x.shape.n; ++n) {
        for (int c = 0; c < x.shape.c; ++c) {
            for (int i = 0; i < rec.resize_h; ++i) {
                float* dst = &out.at(n, c, rec.pad_top + i, rec.pad_left);
                for (int j = 0; j < rec.resize_w; ++j) {
                    dst[j] = x.at(n, c, src_y[i], src_x[j]);
                }
            }
        }
    }
    return out;
}

Tensor pullback_transform(const Tensor& g_out, const TransformRecord& rec) {
    check_dims(g_out, rec, "pullback_transform");
    if (!rec.applied) {
        return g_out;
    }
    const int h = rec.orig_h;
    const int w = rec.orig_w;
    std::vector<int> src_y(rec.resize_h);
    std::vector<int> src_x(rec.resize_w);
    for (int i = 0; i < rec.resize_h; ++i) {
        src_y[i] = nn_source(i, rec.resize_h, h);
    }
    for (int j = 0; j < rec.resize_w; ++j) {
        src_x[j] = nn_source(j, rec.resize_w, w);
    }
    Tensor out(g_out.shape);
    for (int n = 0; n < g_out.shape.n; ++n) {
        for (int c = 0; c < g_out.shape.c; ++c) {
            for (int i = 0; i < rec.resize_h; ++i) {
                const float* src = &g_out.at(n, c, rec.pad_top + i, rec.pad_left);
                for (int j = 0; j < rec.resize_w; ++j) {
                    out.at(n, c, src_y[i], src_x[j]) += src[j];
                }
            }
        }
    }
    return out;
}

} // namespace grf
