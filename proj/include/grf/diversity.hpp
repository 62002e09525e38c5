#pragma once

#include "grf/rng.hpp"
#include "grf/tensor.hpp"

namespace grf {

/// Sampled parameters of one stochastic resize-and-pad transform: enough to
/// replay the forward map and to pull gradients back through it.
struct TransformRecord {
    bool applied = false;
    int resize_h = 0;
    int resize_w = 0;
    int pad_top = 0;
    int pad_left = 0;
    int orig_h = 0;
    int orig_w = 0;

    static TransformRecord identity(int h, int w) {
        TransformRecord r;
        r.applied = false;
        r.resize_h = h;
        r.resize_w = w;
        r.orig_h = h;
        r.orig_w = w;
        return r;
    }
};

/// With probability p, draw a shrink-and-pad transform: target dims uniform
/// in [ceil(0.75*h), h] x [ceil(0.75*w), w], pad offsets uniform over the
/// valid range. Otherwise an identity record.
TransformRecord sample_transform(float p, int h, int w, Rng& rng);

/// Nearest-neighbor resize to (resize_h, resize_w), placed at
/// (pad_top, pad_left) on a zero canvas of the original size. Identity
/// records pass the input through unchanged. Applies to every image in the
/// batch.
Tensor apply_transform(const Tensor& x, const TransformRecord& rec);

/// Exact transpose of apply_transform's linear map: canvas gradients in the
/// pad region are dropped, every output pixel's gradient accumulates onto
/// its nearest-neighbor source pixel.
Tensor pullback_transform(const Tensor& g_out, const TransformRecord& rec);

} // namespace grf
