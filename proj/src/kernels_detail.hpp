#pragma once

#include <cstddef>
#include <cstdint>

// Scalar reference kernels, shared so other backends can delegate the
// entries they do not vectorize.
namespace grf::kernels::detail::scalar {

float* padded_copy(const float* x, int c, int h, int w, int pad);

void conv2d_fwd(const float* x, int c, int h, int w, const float* wgt, int oc, int k,
                const float* bias, float* y);
void conv2d_dweights(const float* x, int c, int h, int w, const float* dy, int oc, int k,
                     float* dw, float* db);
void depthwise_conv_same(const float* x, int planes, int h, int w, const float* k2d, int k,
                         float* y);
void dense_fwd(const float* x, int in, const float* wgt, int out, const float* bias, float* y);
void dense_dinput(const float* dy, int out, const float* wgt, int in, float* dx);
void dense_dweights(const float* x, int in, const float* dy, int out, float* dw, float* db);
void relu_fwd(const float* x, size_t n, float* y);
void relu_bwd(const float* x, const float* dy, size_t n, float* dx);
void sign_op(const float* x, size_t n, float* y);
void axpy(float a, const float* x, size_t n, float* y);
void scale(float a, const float* x, size_t n, float* y);
void add(const float* x, size_t n, float* y);
void project_box(const float* x, const float* ref, float eps, size_t n, float* y);
double l1_norm(const float* x, size_t n);
void maxpool2_fwd(const float* x, int c, int h, int w, float* y, int32_t* idx);
void maxpool2_bwd(const float* dy, int c, int h, int w, const int32_t* idx, float* dx);

} // namespace grf::kernels::detail::scalar
