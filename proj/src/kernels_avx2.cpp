#if defined(__x86_64__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "grf/kernels.hpp"
#include "kernels_detail.hpp"

// AVX2/FMA variants of the hot loops. Convolutions and dense products use
// fused multiply-add with 8-lane accumulators, so their sums round
// differently from the scalar reference (equivalence is tolerance-checked).
// Elementwise kernels keep one rounding per operation and match the scalar
// backend bitwise.
namespace grf::kernels::detail::avx2 {

namespace {

inline float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
    return _mm_cvtss_f32(lo);
}

} // namespace

void conv2d_fwd(const float* x, int c, int h, int w, const float* wgt, int oc, int k,
                const float* bias, float* y) {
    const int pad = k / 2;
    const int pw = w + 2 * pad;
    const int ph = h + 2 * pad;
    const float* xp = scalar::padded_copy(x, c, h, w, pad);
    for (int o = 0; o < oc; ++o) {
        float* yo = y + static_cast<size_t>(o) * h * w;
        const float b = bias ? bias[o] : 0.0f;
        std::fill(yo, yo + static_cast<size_t>(h) * w, b);
        for (int ic = 0; ic < c; ++ic) {
            for (int kh = 0; kh < k; ++kh) {
                for (int kw = 0; kw < k; ++kw) {
                    const float wv = wgt[((static_cast<size_t>(o) * c + ic) * k + kh) * k + kw];
                    const __m256 wv8 = _mm256_set1_ps(wv);
                    for (int yy = 0; yy < h; ++yy) {
                        const float* row =
                            xp + (static_cast<size_t>(ic) * ph + yy + kh) * pw + kw;
                        float* yr = yo + static_cast<size_t>(yy) * w;
                        int xx = 0;
                        for (; xx + 8 <= w; xx += 8) {
                            const __m256 acc = _mm256_loadu_ps(yr + xx);
                            const __m256 src = _mm256_loadu_ps(row + xx);
                            _mm256_storeu_ps(yr + xx, _mm256_fmadd_ps(wv8, src, acc));
                        }
                        for (; xx < w; ++xx) {
                            yr[xx] = std::fma(wv, row[xx], yr[xx]);
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
    const float* xp = scalar::padded_copy(x, c, h, w, pad);
    for (int o = 0; o < oc; ++o) {
        const float* dyo = dy + static_cast<size_t>(o) * h * w;
        __m256 bacc = _mm256_setzero_ps();
        size_t i = 0;
        const size_t plane = static_cast<size_t>(h) * w;
        for (; i + 8 <= plane; i += 8) {
            bacc = _mm256_add_ps(bacc, _mm256_loadu_ps(dyo + i));
        }
        float bsum = hsum8(bacc);
        for (; i < plane; ++i) {
            bsum += dyo[i];
        }
        db[o] += bsum;
        for (int ic = 0; ic < c; ++ic) {
            for (int kh = 0; kh < k; ++kh) {
                for (int kw = 0; kw < k; ++kw) {
                    __m256 acc = _mm256_setzero_ps();
                    float tail = 0.0f;
                    for (int yy = 0; yy < h; ++yy) {
                        const float* row =
                            xp + (static_cast<size_t>(ic) * ph + yy + kh) * pw + kw;
                        const float* dyr = dyo + static_cast<size_t>(yy) * w;
                        int xx = 0;
                        for (; xx + 8 <= w; xx += 8) {
                            acc = _mm256_fmadd_ps(_mm256_loadu_ps(dyr + xx),
                                                  _mm256_loadu_ps(row + xx), acc);
                        }
                        for (; xx < w; ++xx) {
                            tail = std::fma(dyr[xx], row[xx], tail);
                        }
                    }
                    dw[((static_cast<size_t>(o) * c + ic) * k + kh) * k + kw] +=
                        hsum8(acc) + tail;
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
        const float* xp = scalar::padded_copy(x + static_cast<size_t>(pl) * h * w, 1, h, w, pad);
        float* yo = y + static_cast<size_t>(pl) * h * w;
        std::fill(yo, yo + static_cast<size_t>(h) * w, 0.0f);
        for (int kh = 0; kh < k; ++kh) {
            for (int kw = 0; kw < k; ++kw) {
                const float wv = k2d[static_cast<size_t>(kh) * k + kw];
                const __m256 wv8 = _mm256_set1_ps(wv);
                for (int yy = 0; yy < h; ++yy) {
                    const float* row = xp + (static_cast<size_t>(yy) + kh) * pw + kw;
                    float* yr = yo + static_cast<size_t>(yy) * w;
                    int xx = 0;
                    for (; xx + 8 <= w; xx += 8) {
                        const __m256 acc = _mm256_loadu_ps(yr + xx);
                        _mm256_storeu_ps(yr + xx,
                                         _mm256_fmadd_ps(wv8, _mm256_loadu_ps(row + xx), acc));
                    }
                    for (; xx < w; ++xx) {
                        yr[xx] = std::fma(wv, row[xx], yr[xx]);
                    }
                }
            }
        }
    }
}

void dense_fwd(const float* x, int in, const float* wgt, int out, const float* bias, float* y) {
    for (int o = 0; o < out; ++o) {
        const float* row = wgt + static_cast<size_t>(o) * in;
        __m256 acc = _mm256_setzero_ps();
        int i = 0;
        for (; i + 8 <= in; i += 8) {
            acc = _mm256_fmadd_ps(_mm256_loadu_ps(row + i), _mm256_loadu_ps(x + i), acc);
        }
        float s = hsum8(acc);
        for (; i < in; ++i) {
            s = std::fma(row[i], x[i], s);
        }
        y[o] = s + (bias ? bias[o] : 0.0f);
    }
}

void dense_dinput(const float* dy, int out, const float* wgt, int in, float* dx) {
    std::fill(dx, dx + in, 0.0f);
    for (int o = 0; o < out; ++o) {
        const float* row = wgt + static_cast<size_t>(o) * in;
        const float d = dy[o];
        const __m256 d8 = _mm256_set1_ps(d);
        int i = 0;
        for (; i + 8 <= in; i += 8) {
            const __m256 acc = _mm256_loadu_ps(dx + i);
            _mm256_storeu_ps(dx + i, _mm256_fmadd_ps(d8, _mm256_loadu_ps(row + i), acc));
        }
        for (; i < in; ++i) {
            dx[i] = std::fma(d, row[i], dx[i]);
        }
    }
}

void dense_dweights(const float* x, int in, const float* dy, int out, float* dw, float* db) {
    for (int o = 0; o < out; ++o) {
        const float d = dy[o];
        db[o] += d;
        float* row = dw + static_cast<size_t>(o) * in;
        const __m256 d8 = _mm256_set1_ps(d);
        int i = 0;
        for (; i + 8 <= in; i += 8) {
            const __m256 acc = _mm256_loadu_ps(row + i);
            _mm256_storeu_ps(row + i, _mm256_fmadd_ps(d8, _mm256_loadu_ps(x + i), acc));
        }
        for (; i < in; ++i) {
            row[i] = std::fma(d, x[i], row[i]);
        }
    }
}

void relu_fwd(const float* x, size_t n, float* y) {
    const __m256 zero = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    }
    for (; i < n; ++i) {
        y[i] = x[i] > 0.0f ? x[i] : 0.0f;
    }
}

void relu_bwd(const float* x, const float* dy, size_t n, float* dx) {
    const __m256 zero = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dx + i, _mm256_and_ps(mask, _mm256_loadu_ps(dy + i)));
    }
    for (; i < n; ++i) {
        dx[i] = x[i] > 0.0f ? dy[i] : 0.0f;
    }
}

void sign_op(const float* x, size_t n, float* y) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 neg = _mm256_set1_ps(-1.0f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        const __m256 pos = _mm256_and_ps(_mm256_cmp_ps(v, zero, _CMP_GT_OQ), one);
        const __m256 negp = _mm256_and_ps(_mm256_cmp_ps(v, zero, _CMP_LT_OQ), neg);
        _mm256_storeu_ps(y + i, _mm256_or_ps(pos, negp));
    }
    for (; i < n; ++i) {
        y[i] = x[i] > 0.0f ? 1.0f : (x[i] < 0.0f ? -1.0f : 0.0f);
    }
}

void axpy(float a, const float* x, size_t n, float* y) {
    const __m256 a8 = _mm256_set1_ps(a);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        // mul + add kept separate to match the scalar rounding exactly
        const __m256 t = _mm256_mul_ps(a8, _mm256_loadu_ps(x + i));
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), t));
    }
    for (; i < n; ++i) {
        const float t = a * x[i];
        y[i] += t;
    }
}

void scale(float a, const float* x, size_t n, float* y) {
    const __m256 a8 = _mm256_set1_ps(a);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_mul_ps(a8, _mm256_loadu_ps(x + i)));
    }
    for (; i < n; ++i) {
        y[i] = a * x[i];
    }
}

void add(const float* x, size_t n, float* y) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
    }
    for (; i < n; ++i) {
        y[i] += x[i];
    }
}

void project_box(const float* x, const float* ref, float eps, size_t n, float* y) {
    const __m256 eps8 = _mm256_set1_ps(eps);
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 r = _mm256_loadu_ps(ref + i);
        __m256 v = _mm256_loadu_ps(x + i);
        v = _mm256_max_ps(v, _mm256_sub_ps(r, eps8));
        v = _mm256_min_ps(v, _mm256_add_ps(r, eps8));
        v = _mm256_max_ps(v, zero);
        _mm256_storeu_ps(y + i, _mm256_min_ps(v, one));
    }
    for (; i < n; ++i) {
        const float lo = ref[i] - eps;
        const float hi = ref[i] + eps;
        float v = x[i] < lo ? lo : x[i];
        v = v > hi ? hi : v;
        v = v < 0.0f ? 0.0f : v;
        y[i] = v > 1.0f ? 1.0f : v;
    }
}

double l1_norm(const float* x, size_t n) {
    const __m256 absmask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7FFFFFFF));
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_and_ps(_mm256_loadu_ps(x + i), absmask);
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) {
        s += std::fabs(static_cast<double>(x[i]));
    }
    return s;
}

} // namespace grf::kernels::detail::avx2

namespace grf::kernels {

const Backend& avx2_backend() {
    namespace ka = detail::avx2;
    namespace ks = detail::scalar;
    static const Backend b = {
        "avx2",            ka::conv2d_fwd,   ka::conv2d_dweights, ka::depthwise_conv_same,
        ka::dense_fwd,     ka::dense_dinput, ka::dense_dweights,  ka::relu_fwd,
        ka::relu_bwd,      ka::sign_op,      ka::axpy,            ka::scale,
        ka::add,           ka::project_box,  ka::l1_norm,         ks::maxpool2_fwd,
        ks::maxpool2_bwd,
    };
    return b;
}

} // namespace grf::kernels

#endif // __x86_64__
