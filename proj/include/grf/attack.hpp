#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "grf/hash.hpp"
#include "grf/model.hpp"
#include "grf/rng.hpp"
#include "grf/tensor.hpp"

namespace grf {

/// Full specification of one attack. The step size is always derived as
/// epsilon / iterations and never stored. With correction_n = 1 the refined
/// variants reproduce their vanilla counterparts bitwise.
struct AttackConfig {
    float epsilon = 16.0f / 255.0f;
    int iterations = 8;
    float diversity_p = 0.7f;
    int correction_n = 11;
    float momentum_mu = 1.0f;
    int kernel_size = 5;
    float kernel_sigma = 1.25f;  // kernel_size / 4 by convention
    bool use_diversity = true;
    bool use_ti = true;
    bool use_momentum = true;
    uint64_t seed = 0;

    float step_size() const { return epsilon / static_cast<float>(iterations); }
    void validate() const;  // throws std::invalid_argument
};

/// Canonical 32-byte digest of a config (field order and widths fixed), used
/// to tie adversarial files and reports back to the attack that made them.
Sha256 config_hash(const AttackConfig& cfg);

enum class AttackVariant { ifgsm, di, dti, dtmi, r_di, r_dti, r_dtmi };

AttackVariant parse_variant(const std::string& name);
std::string variant_name(AttackVariant v);

/// Feature flags for a named variant applied to a base config. Vanilla
/// variants force correction_n = 1; refined ones keep the configured n.
AttackConfig variant_config(const AttackConfig& base, AttackVariant v);

/// Normalized Gaussian taps, exp(-(di^2+dj^2)/(2 sigma^2)) around the
/// center, summing to 1. Size must be odd.
Kernel2d gaussian_kernel(int size, float sigma);

/// Gradient of the mean of per-model cross-entropy losses (equal weights):
/// the arithmetic mean of per-model input gradients. Models must agree on
/// input spec and class count.
Tensor ensemble_gradient(const std::vector<const Classifier*>& models, const Tensor& x,
                         const std::vector<int>& labels);

/// Mean over correction_n samples of the per-sample attack gradient: each
/// sample independently transforms every image (stream rng.fold(image)
/// .fold(correction)), takes the ensemble gradient, pulls it back through
/// the transform into original-image coordinates, then smooths with the
/// Gaussian kernel. Disabled stages drop out of the chain.
Tensor refined_gradient(const std::vector<const Classifier*>& models, const Tensor& x_t,
                        const std::vector<int>& labels, const AttackConfig& cfg, Rng rng);

struct MomentumState {
    Tensor g;  // accumulated moment gradient, zero-initialized
};

/// One sign-step update. With momentum: g' = mu*g + g_r/||g_r||_1 (per
/// image, 0/0 := 0) and x' = project(x + alpha*sign(g')); without momentum
/// the sign of g_r is used directly.
std::pair<Tensor, MomentumState> attack_step(const Tensor& x_t, const Tensor& x_orig,
                                             const Tensor& g_r, const MomentumState& state,
                                             const AttackConfig& cfg);

/// Exactly cfg.iterations rounds of refined_gradient + attack_step starting
/// from the clean batch. Images run independently on per-image streams
/// Rng(seed).fold(image).fold(iteration), so output bytes do not depend on
/// the worker count. Output stays inside the epsilon band and [0, 1].
Tensor run_attack(const std::vector<const Classifier*>& models, const Tensor& batch,
                  const std::vector<int>& labels, const AttackConfig& cfg);

} // namespace grf
