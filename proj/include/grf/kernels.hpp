#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace grf::kernels {

/// Table of the arithmetic inner loops. Every entry has a scalar reference
/// implementation; on x86-64 an AVX2/FMA variant is selected at runtime.
/// Elementwise entries (sign, relu, axpy, scale, add, project_box) are
/// exactly rounded per element and therefore bitwise identical across
/// backends; convolution, dense and reduction entries reassociate sums and
/// agree only to tolerance (covered by the equivalence tests).
struct Backend {
    const char* name;

    // Multi-channel 2-D convolution of one image, stride 1, zero padding to
    // same spatial size, square odd kernel. x: c*h*w, wgt: oc*c*k*k,
    // bias: oc or nullptr, y: oc*h*w (overwritten).
    void (*conv2d_fwd)(const float* x, int c, int h, int w, const float* wgt, int oc, int k,
                       const float* bias, float* y);

    // Weight/bias gradients for one image, accumulated into dw (oc*c*k*k)
    // and db (oc). dy: oc*h*w.
    void (*conv2d_dweights)(const float* x, int c, int h, int w, const float* dy, int oc, int k,
                            float* dw, float* db);

    // Depthwise same-size convolution of `planes` independent h*w planes
    // with one k*k kernel. y overwritten.
    void (*depthwise_conv_same)(const float* x, int planes, int h, int w, const float* k2d,
                                int k, float* y);

    // y[o] = bias[o] + sum_i wgt[o*in+i] * x[i]; bias may be nullptr.
    void (*dense_fwd)(const float* x, int in, const float* wgt, int out, const float* bias,
                      float* y);
    // dx[i] = sum_o dy[o] * wgt[o*in+i] (overwritten)
    void (*dense_dinput)(const float* dy, int out, const float* wgt, int in, float* dx);
    // dw[o*in+i] += dy[o]*x[i]; db[o] += dy[o]
    void (*dense_dweights)(const float* x, int in, const float* dy, int out, float* dw,
                           float* db);

    void (*relu_fwd)(const float* x, size_t n, float* y);
    void (*relu_bwd)(const float* x, const float* dy, size_t n, float* dx);

    void (*sign)(const float* x, size_t n, float* y);
    // y[i] += a * x[i], two roundings (no fma)
    void (*axpy)(float a, const float* x, size_t n, float* y);
    // y[i] = a * x[i]
    void (*scale)(float a, const float* x, size_t n, float* y);
    // y[i] += x[i]
    void (*add)(const float* x, size_t n, float* y);
    // y[i] = clamp(clamp(x[i], ref[i]-eps, ref[i]+eps), 0, 1)
    void (*project_box)(const float* x, const float* ref, float eps, size_t n, float* y);
    // sum_i |x[i]| accumulated in f64
    double (*l1_norm)(const float* x, size_t n);

    // 2x2 stride-2 max pooling of c planes of even h*w. idx records the
    // linear in-plane offset of the first maximal element in scan order.
    void (*maxpool2_fwd)(const float* x, int c, int h, int w, float* y, int32_t* idx);
    void (*maxpool2_bwd)(const float* dy, int c, int h, int w, const int32_t* idx, float* dx);
};

const Backend& scalar_backend();
#if defined(__x86_64__)
const Backend& avx2_backend();
bool avx2_supported();
#endif

/// Backend resolved once per process: GRF_KERNELS=scalar|avx2 overrides,
/// otherwise the best supported variant wins.
const Backend& active_backend();

/// All backends usable on this machine (for equivalence tests).
std::vector<const Backend*> available_backends();

} // namespace grf::kernels
