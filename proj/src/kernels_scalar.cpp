#include "grf/kernels.hpp"

#include "kernels_detail.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace grf::kernels::detail::scalar {

// Zero-padded copy of `c` planes, pad cells on each side. Reused scratch.
float* padded_copy(const float* x, int c, int h, int w, int pad) {
    static thread_local std::vector<float> buf;
    const int ph = h + 2 * pad;
    const int pw = w + 2 * pad;
    buf.assign(static_cast<size_t>(c) * ph * pw, 0.0f);
    for (int ic = 0; ic < c; ++ic) {
        for (int y = 0; y < h; ++y) {
            std::memcpy(buf.data() + (static_cast<size_t>(ic) * ph + y + pad) * pw + pad,
                        x + (static_cast<size_t>(ic) * h + y) * w,
                        static_cast<size_t>(w) * sizeof(float));
        }
    }
    return buf.data();
}

void conv2d_fwd(const float* x, int c, int h, int w, const float* wgt, int oc, int k,
                const float* bias, float* y) {
    const int pad = k / 2;
    const int pw = w + 2 * pad;
    const int ph = h + 2 * pad;
    const float* xp = padded_copy(x, c, h, w, pad);
    for (int o = 0; o < oc; ++o) {
        float* yo = y + static_cast<size_t>(o) * h * w;
        const float b = bias ? bias[o] : 0.0f;
        std::fill(yo, yo + static_cast<size_t>(h) * w, b);
        for (int ic = 0; ic < c; ++ic) {
            for (int kh = 0; kh < k; ++kh) {
                for (int kw = 0; kw < k; ++kw) {
                    const float wv = wgt[((static_cast<size_t>(o) * c + ic) * k + kh) * k + kw];
                    for (int yy = 0; yy < h; ++yy) {
                        const float* row =
                            xp + (static_cast<size_t>(ic) * ph + yy + kh) * pw + kw;
                        float* yr = yo + static_cast<size_t>(yy) * w;
                        for (int xx = 0; xx < w; ++xx) {
                            yr[xx] += wv * row[xx];
                        }
                    }
                }
            }
        }
    }
}

void conv2d_dweights(const float* x, int c, int h, int w, const float* dy, int oc, int k,
                     float* dw, float* db) {
    const int pad = k / 2;
    const int pw = w + 2 * pad;
    const int ph = h + 2 * pad;
    const float* xp = padded_copy(x, c, h, w, pad);
    for (int o = 0; o < oc; ++o) {
        const float* dyo = dy + static_cast<size_t>(o) * h * w;
        float bsum = 0.0f;
        for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) {
            bsum += dyo[i];
        }
        db[o] += bsum;
        for (int ic = 0; ic < c; ++ic) {
            for (int kh = 0; kh < k; ++kh) {
                for (int kw = 0; kw < k; ++kw) {
                    float s = 0.0f;
                    for (int yy = 0; yy < h; ++yy) {
                        const float* row =
                            xp + (static_cast<size_t>(ic) * ph + yy + kh) * pw + kw;
                        const float* dyr = dyo + static_cast<size_t>(yy) * w;
                        for (int xx = 0; xx < w; ++xx) {
                            s += dyr[xx] * row[xx];
                        }
                    }
                    dw[((static_cast<size_t>(o) * c + ic) * k + kh) * k + kw] += s;
                }
            }
        }
    }
}

void depthwise_conv_same(const float* x, int planes, int h, int w, const float* k2d, int k,
                         float* y) {
    const int pad = k / 2;
    const int pw = w + 2 * pad;
    for (int pl = 0; pl < planes; ++pl) {
        const float* xp = padded_copy(x + static_cast<size_t>(pl) * h * w, 1, h, w, pad);
        float* yo = y + static_cast<size_t>(pl) * h * w;
        std::fill(yo, yo + static_cast<size_t>(h) * w, 0.0f);
        for (int kh = 0; kh < k; ++kh) {
            for (int kw = 0; kw < k; ++kw) {
                const float wv = k2d[static_cast<size_t>(kh) * k + kw];
                for (int yy = 0; yy < h; ++yy) {
                    const float* row = xp + (static_cast<size_t>(yy) + kh) * pw + kw;
                    float* yr = yo + static_cast<size_t>(yy) * w;
                    for (int xx = 0; xx < w; ++xx) {
                        yr[xx] += wv * row[xx];
                    }
                }
            }
        }
    }
}

void dense_fwd(const float* x, int in, const float* wgt, int out, const float* bias, float* y) {
    for (int o = 0; o < out; ++o) {
        const float* row = wgt + static_cast<size_t>(o) * in;
        float s = bias ? bias[o] : 0.0f;
        for (int i = 0; i < in; ++i) {
            s += row[i] * x[i];
        }
        y[o] = s;
    }
}

void dense_dinput(const float* dy, int out, const float* wgt, int in, float* dx) {
    std::fill(dx, dx + in, 0.0f);
    for (int o = 0; o < out; ++o) {
        const float* row = wgt + static_cast<size_t>(o) * in;
        const float d = dy[o];
        for (int i = 0; i < in; ++i) {
            dx[i] += d * row[i];
        }
    }
}

void dense_dweights(const float* x, int in, const float* dy, int out, float* dw, float* db) {
    for (int o = 0; o < out; ++o) {
        const float d = dy[o];
        db[o] += d;
        float* row = dw + static_cast<size_t>(o) * in;
        for (int i = 0; i < in; ++i) {
            row[i] += d * x[i];
        }
    }
}

void relu_fwd(const float* x, size_t n, float* y) {
    for (size_t i = 0; i < n; ++i) {
        y[i] = x[i] > 0.0f ? x[i] : 0.0f;
    }
}

void relu_bwd(const float* x, const float* dy, size_t n, float* dx) {
    for (size_t i = 0; i < n; ++i) {
        dx[i] = x[i] > 0.0f ? dy[i] : 0.0f;
    }
}

void sign_op(const float* x, size_t n, float* y) {
    for (size_t i = 0; i < n; ++i) {
        y[i] = x[i] > 0.0f ? 1.0f : (x[i] < 0.0f ? -1.0f : 0.0f);
    }
}

void axpy(float a, const float* x, size_t n, float* y) {
    for (size_t i = 0; i < n; ++i) {
        const float t = a * x[i];
        y[i] += t;
    }
}

void scale(float a, const float* x, size_t n, float* y) {
    for (size_t i = 0; i < n; ++i) {
        y[i] = a * x[i];
    }
}

void add(const float* x, size_t n, float* y) {
    for (size_t i = 0; i < n; ++i) {
        y[i] += x[i];
    }
}

void project_box(const float* x, const float* ref, float eps, size_t n, float* y) {
    for (size_t i = 0; i < n; ++i) {
        const float lo = ref[i] - eps;
        const float hi = ref[i] + eps;
        float v = x[i] < lo ? lo : x[i];
        v = v > hi ? hi : v;
        v = v < 0.0f ? 0.0f : v;
        y[i] = v > 1.0f ? 1.0f : v;
    }
}

double l1_norm(const float* x, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        s += std::fabs(static_cast<double>(x[i]));
    }
    return s;
}

void maxpool2_fwd(const float* x, int c, int h, int w, float* y, int32_t* idx) {
    const int oh = h / 2;
    const int ow = w / 2;
    for (int ic = 0; ic < c; ++ic) {
        const float* xp = x + static_cast<size_t>(ic) * h * w;
        float* yp = y + static_cast<size_t>(ic) * oh * ow;
        int32_t* ip = idx + static_cast<size_t>(ic) * oh * ow;
        for (int yy = 0; yy < oh; ++yy) {
            for (int xx = 0; xx < ow; ++xx) {
                // first maximal element in scan order wins ties
                int32_t best = (yy * 2) * w + xx * 2;
                float bv = xp[best];
                const int32_t cand[3] = {(yy * 2) * w + xx * 2 + 1, (yy * 2 + 1) * w + xx * 2,
                                         (yy * 2 + 1) * w + xx * 2 + 1};
                for (int32_t ci : cand) {
                    if (xp[ci] > bv) {
                        bv = xp[ci];
                        best = ci;
                    }
                }
                yp[static_cast<size_t>(yy) * ow + xx] = bv;
                ip[static_cast<size_t>(yy) * ow + xx] = best;
            }
        }
    }
}

void maxpool2_bwd(const float* dy, int c, int h, int w, const int32_t* idx, float* dx) {
    const int oh = h / 2;
    const int ow = w / 2;
    std::fill(dx, dx + static_cast<size_t>(c) * h * w, 0.0f);
    for (int ic = 0; ic < c; ++ic) {
        const float* dyp = dy + static_cast<size_t>(ic) * oh * ow;
        const int32_t* ip = idx + static_cast<size_t>(ic) * oh * ow;
        float* dxp = dx + static_cast<size_t>(ic) * h * w;
        for (size_t i = 0; i < static_cast<size_t>(oh) * ow; ++i) {
            dxp[ip[i]] += dyp[i];
        }
    }
}

} // namespace grf::kernels::detail::scalar

namespace grf::kernels {

const Backend& scalar_backend() {
    namespace ks = detail::scalar;
    static const Backend b = {
        "scalar",          ks::conv2d_fwd,   ks::conv2d_dweights, ks::depthwise_conv_same,
        ks::dense_fwd,     ks::dense_dinput, ks::dense_dweights,  ks::relu_fwd,
        ks::relu_bwd,      ks::sign_op,      ks::axpy,            ks::scale,
        ks::add,           ks::project_box,  ks::l1_norm,         ks::maxpool2_fwd,
        ks::maxpool2_bwd,
    };
    return b;
}

} // namespace grf::kernels
