#include "grf/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "grf/kernels.hpp"

namespace grf {

std::string Shape::str() const {
    std::ostringstream os;
    os << "(" << n << "," << c << "," << h << "," << w << ")";
    return os.str();
}

bool Tensor::all_finite() const {
    for (float v : data) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

Tensor sign(const Tensor& x) {
    Tensor out(x.shape);
    kernels::active_backend().sign(x.data.data(), x.size(), out.data.data());
    return out;
}

Tensor project_linf(const Tensor& x_adv, const Tensor& x_orig, float eps) {
    if (x_adv.shape != x_orig.shape) {
        throw std::invalid_argument("project_linf: shape mismatch " + x_adv.shape.str() +
                                    " vs " + x_orig.shape.str());
    }
    if (!(eps >= 0.0f)) {
        throw std::invalid_argument("project_linf: epsilon must be >= 0");
    }
    Tensor out(x_adv.shape);
    kernels::active_backend().project_box(x_adv.data.data(), x_orig.data.data(), eps, x_adv.size(),
                                          out.data.data());
    return out;
}

Tensor conv2d_same(const Tensor& x, const Kernel2d& kernel) {
    if (kernel.size < 1 || kernel.size % 2 == 0) {
        throw std::invalid_argument("conv2d_same: kernel size must be odd, got " +
                                    std::to_string(kernel.size));
    }
    if (kernel.taps.size() != static_cast<size_t>(kernel.size) * kernel.size) {
        throw std::invalid_argument("conv2d_same: kernel tap count does not match size");
    }
    Tensor out(x.shape);
    kernels::active_backend().depthwise_conv_same(x.data.data(), x.shape.n * x.shape.c, x.shape.h,
                                                  x.shape.w, kernel.taps.data(), kernel.size,
                                                  out.data.data());
    return out;
}

SoftmaxCeResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    const int n = logits.shape.n;
    const int classes = logits.shape.c;
    if (logits.shape.h != 1 || logits.shape.w != 1) {
        throw std::invalid_argument("softmax_cross_entropy: logits must have shape (n,classes,1,1)");
    }
    if (static_cast<size_t>(n) != labels.size()) {
        throw std::invalid_argument("softmax_cross_entropy: batch/label count mismatch");
    }
    SoftmaxCeResult res;
    res.dlogits = Tensor(logits.shape);
    double total = 0.0;
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const int label = labels[i];
        if (label < 0 || label >= classes) {
            throw std::invalid_argument("softmax_cross_entropy: label " + std::to_string(label) +
                                        " out of range [0," + std::to_string(classes) + ")");
        }
        const float* z = logits.data.data() + static_cast<size_t>(i) * classes;
        float* dz = res.dlogits.data.data() + static_cast<size_t>(i) * classes;
        double zmax = z[0];
        for (int j = 1; j < classes; ++j) {
            zmax = std::max(zmax, static_cast<double>(z[j]));
        }
        double se = 0.0;
        for (int j = 0; j < classes; ++j) {
            se += std::exp(static_cast<double>(z[j]) - zmax);
        }
        total += -(static_cast<double>(z[label]) - zmax - std::log(se));
        for (int j = 0; j < classes; ++j) {
            const double p = std::exp(static_cast<double>(z[j]) - zmax) / se;
            dz[j] = static_cast<float>((p - (j == label ? 1.0 : 0.0)) * inv_n);
        }
    }
    res.loss = total * inv_n;
    return res;
}

Tensor l1_normalize_per_image(const Tensor& g) {
    Tensor out(g.shape);
    const size_t per_image = g.shape.image_numel();
    const auto& k = kernels::active_backend();
    for (int i = 0; i < g.shape.n; ++i) {
        const float* src = g.image(i);
        float* dst = out.data.data() + static_cast<size_t>(i) * per_image;
        const double norm = k.l1_norm(src, per_image);
        if (norm == 0.0) {
            continue;  // 0 / ||0||_1 := 0, out already zero
        }
        for (size_t j = 0; j < per_image; ++j) {
            dst[j] = static_cast<float>(static_cast<double>(src[j]) / norm);
        }
    }
    return out;
}

} // namespace grf
