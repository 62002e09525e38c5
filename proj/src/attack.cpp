#include "grf/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "grf/diversity.hpp"
#include "grf/kernels.hpp"
#include "grf/parallel.hpp"

namespace grf {

void AttackConfig::validate() const {
    if (!(epsilon >= 0.0f && epsilon <= 1.0f)) {
        throw std::invalid_argument("AttackConfig: epsilon must lie in [0,1]");
    }
    if (iterations < 1) {
        throw std::invalid_argument("AttackConfig: iterations must be >= 1");
    }
    if (!(diversity_p >= 0.0f && diversity_p <= 1.0f)) {
        throw std::invalid_argument("AttackConfig: diversity_p must lie in [0,1]");
    }
    if (correction_n < 1) {
        throw std::invalid_argument("AttackConfig: correction_n must be >= 1");
    }
    if (!(momentum_mu >= 0.0f)) {
        throw std::invalid_argument("AttackConfig: momentum_mu must be >= 0");
    }
    if (kernel_size < 1 || kernel_size % 2 == 0) {
        throw std::invalid_argument("AttackConfig: kernel_size must be odd");
    }
    if (!(kernel_sigma > 0.0f)) {
        throw std::invalid_argument("AttackConfig: kernel_sigma must be > 0");
    }
}

Sha256 config_hash(const AttackConfig& cfg) {
    std::vector<uint8_t> bytes;
    auto push_u32 = [&bytes](uint32_t v) {
        bytes.push_back(static_cast<uint8_t>(v));
        bytes.push_back(static_cast<uint8_t>(v >> 8));
        bytes.push_back(static_cast<uint8_t>(v >> 16));
        bytes.push_back(static_cast<uint8_t>(v >> 24));
    };
    uint32_t bits;
    std::memcpy(&bits, &cfg.epsilon, 4);
    push_u32(bits);
    push_u32(static_cast<uint32_t>(cfg.iterations));
    std::memcpy(&bits, &cfg.diversity_p, 4);
    push_u32(bits);
    push_u32(static_cast<uint32_t>(cfg.correction_n));
    std::memcpy(&bits, &cfg.momentum_mu, 4);
    push_u32(bits);
    push_u32(static_cast<uint32_t>(cfg.kernel_size));
    std::memcpy(&bits, &cfg.kernel_sigma, 4);
    push_u32(bits);
    push_u32((cfg.use_diversity ? 1u : 0u) | (cfg.use_ti ? 2u : 0u) |
             (cfg.use_momentum ? 4u : 0u));
    push_u32(static_cast<uint32_t>(cfg.seed));
    push_u32(static_cast<uint32_t>(cfg.seed >> 32));
    return sha256(bytes);
}

AttackVariant parse_variant(const std::string& name) {
    if (name == "ifgsm") return AttackVariant::ifgsm;
    if (name == "di") return AttackVariant::di;
    if (name == "dti") return AttackVariant::dti;
    if (name == "dtmi") return AttackVariant::dtmi;
    if (name == "r-di") return AttackVariant::r_di;
    if (name == "r-dti") return AttackVariant::r_dti;
    if (name == "r-dtmi") return AttackVariant::r_dtmi;
    throw std::invalid_argument("unknown attack variant '" + name +
                                "' (valid: ifgsm, di, dti, dtmi, r-di, r-dti, r-dtmi)");
}

std::string variant_name(AttackVariant v) {
    switch (v) {
        case AttackVariant::ifgsm: return "ifgsm";
        case AttackVariant::di: return "di";
        case AttackVariant::dti: return "dti";
        case AttackVariant::dtmi: return "dtmi";
        case AttackVariant::r_di: return "r-di";
        case AttackVariant::r_dti: return "r-dti";
        case AttackVariant::r_dtmi: return "r-dtmi";
    }
    throw std::invalid_argument("bad AttackVariant");
}

AttackConfig variant_config(const AttackConfig& base, AttackVariant v) {
    AttackConfig cfg = base;
    switch (v) {
        case AttackVariant::ifgsm:
            cfg.use_diversity = false;
            cfg.use_ti = false;
            cfg.use_momentum = false;
            cfg.correction_n = 1;
            break;
        case AttackVariant::di:
            cfg.use_diversity = true;
            cfg.use_ti = false;
            cfg.use_momentum = false;
            cfg.correction_n = 1;
            break;
        case AttackVariant::dti:
            cfg.use_diversity = true;
            cfg.use_ti = true;
            cfg.use_momentum = false;
            cfg.correction_n = 1;
            break;
        case AttackVariant::dtmi:
            cfg.use_diversity = true;
            cfg.use_ti = true;
            cfg.use_momentum = true;
            cfg.correction_n = 1;
            break;
        case AttackVariant::r_di:
            cfg.use_diversity = true;
            cfg.use_ti = false;
            cfg.use_momentum = false;
            break;
        case AttackVariant::r_dti:
            cfg.use_diversity = true;
            cfg.use_ti = true;
            cfg.use_momentum = false;
            break;
        case AttackVariant::r_dtmi:
            cfg.use_diversity = true;
            cfg.use_ti = true;
            cfg.use_momentum = true;
            break;
    }
    return cfg;
}

Kernel2d gaussian_kernel(int size, float sigma) {
    if (size < 1 || size % 2 == 0) {
        throw std::invalid_argument("gaussian_kernel: size must be odd, got " +
                                    std::to_string(size));
    }
    if (!(sigma > 0.0f)) {
        throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
    }
    Kernel2d k;
    k.size = size;
    k.taps.resize(static_cast<size_t>(size) * size);
    const int c = size / 2;
    const double denom = 2.0 * static_cast<double>(sigma) * sigma;
    std::vector<double> raw(k.taps.size());
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double di = i - c;
            const double dj = j - c;
            const double v = std::exp(-(di * di + dj * dj) / denom);
            raw[static_cast<size_t>(i) * size + j] = v;
            sum += v;
        }
    }
    for (size_t i = 0; i < raw.size(); ++i) {
        k.taps[i] = static_cast<float>(raw[i] / sum);
    }
    return k;
}

namespace {

void check_models(const std::vector<const Classifier*>& models) {
    if (models.empty()) {
        throw std::invalid_argument("attack: need at least one model");
    }
    const Classifier& first = *models.front();
    for (const Classifier* m : models) {
        if (m->in_c != first.in_c || m->in_h != first.in_h || m->in_w != first.in_w ||
            m->num_classes != first.num_classes) {
            throw std::invalid_argument(
                "attack: models disagree on input spec or class count");
        }
    }
}

} // namespace

Tensor ensemble_gradient(const std::vector<const Classifier*>& models, const Tensor& x,
                         const std::vector<int>& labels) {
    check_models(models);
    const auto& k = kernels::active_backend();
    Tensor acc = input_gradient(*models.front(), x, labels);
    for (size_t m = 1; m < models.size(); ++m) {
        const Tensor g = input_gradient(*models[m], x, labels);
        k.add(g.data.data(), g.size(), acc.data.data());
    }
    if (models.size() > 1) {
        const float inv = 1.0f / static_cast<float>(models.size());
        k.scale(inv, acc.data.data(), acc.size(), acc.data.data());
    }
    return acc;
}

Tensor refined_gradient(const std::vector<const Classifier*>& models, const Tensor& x_t,
                        const std::vector<int>& labels, const AttackConfig& cfg, Rng rng) {
    check_models(models);
    cfg.validate();
    const auto& k = kernels::active_backend();
    const Kernel2d smooth =
        cfg.use_ti ? gaussian_kernel(cfg.kernel_size, cfg.kernel_sigma) : Kernel2d{};
    const int n_img = x_t.shape.n;

    Tensor acc(x_t.shape);
    for (int i = 0; i < cfg.correction_n; ++i) {
        Tensor g;
        if (cfg.use_diversity) {
            // every image gets its own draw: stream rng.fold(image).fold(correction)
            std::vector<TransformRecord> recs(n_img);
            Tensor tx(x_t.shape);
            for (int j = 0; j < n_img; ++j) {
                Rng stream = rng.fold(j).fold(i);
                recs[j] = sample_transform(cfg.diversity_p, x_t.shape.h, x_t.shape.w, stream);
                Tensor img(Shape{1, x_t.shape.c, x_t.shape.h, x_t.shape.w});
                std::copy(x_t.image(j), x_t.image(j) + img.size(), img.data.data());
                const Tensor timg = apply_transform(img, recs[j]);
                std::copy(timg.data.begin(), timg.data.end(), tx.image(j));
            }
            g = ensemble_gradient(models, tx, labels);
            for (int j = 0; j < n_img; ++j) {
                Tensor gi(Shape{1, x_t.shape.c, x_t.shape.h, x_t.shape.w});
                std::copy(g.image(j), g.image(j) + gi.size(), gi.data.data());
                const Tensor back = pullback_transform(gi, recs[j]);
                std::copy(back.data.begin(), back.data.end(), g.image(j));
            }
        } else {
            g = ensemble_gradient(models, x_t, labels);
        }
        if (cfg.use_ti) {
            g = conv2d_same(g, smooth);
        }
        k.add(g.data.data(), g.size(), acc.data.data());
    }
    if (cfg.correction_n > 1) {
        const float inv = 1.0f / static_cast<float>(cfg.correction_n);
        k.scale(inv, acc.data.data(), acc.size(), acc.data.data());
    }
    return acc;
}

std::pair<Tensor, MomentumState> attack_step(const Tensor& x_t, const Tensor& x_orig,
                                             const Tensor& g_r, const MomentumState& state,
                                             const AttackConfig& cfg) {
    if (x_t.shape != x_orig.shape || x_t.shape != g_r.shape) {
        throw std::invalid_argument("attack_step: shape mismatch");
    }
    const auto& k = kernels::active_backend();
    const float alpha = cfg.step_size();
    MomentumState next;
    Tensor update;
    if (cfg.use_momentum) {
        if (state.g.shape != x_t.shape) {
            throw std::invalid_argument("attack_step: momentum state shape mismatch");
        }
        const Tensor gn = l1_normalize_per_image(g_r);
        next.g = Tensor(x_t.shape);
        k.scale(cfg.momentum_mu, state.g.data.data(), state.g.size(), next.g.data.data());
        k.add(gn.data.data(), gn.size(), next.g.data.data());
        update = sign(next.g);
    } else {
        next.g = state.g;
        update = sign(g_r);
    }
    Tensor x_next = x_t;
    k.axpy(alpha, update.data.data(), update.size(), x_next.data.data());
    return {project_linf(x_next, x_orig, cfg.epsilon), std::move(next)};
}

Tensor run_attack(const std::vector<const Classifier*>& models, const Tensor& batch,
                  const std::vector<int>& labels, const AttackConfig& cfg) {
    check_models(models);
    cfg.validate();
    if (labels.size() != static_cast<size_t>(batch.shape.n)) {
        throw std::invalid_argument("run_attack: batch/label count mismatch");
    }
    Tensor out(batch.shape);
    const Rng base(cfg.seed);
    const size_t per_image = batch.shape.image_numel();
    // Each image runs its full trajectory on streams derived from its global
    // batch index, so the partition into workers cannot change the result.
    parallel_for(static_cast<size_t>(batch.shape.n), [&](size_t begin, size_t end) {
        for (size_t j = begin; j < end; ++j) {
            const Shape single{1, batch.shape.c, batch.shape.h, batch.shape.w};
            Tensor x0(single);
            std::copy(batch.image(static_cast<int>(j)),
                      batch.image(static_cast<int>(j)) + per_image, x0.data.data());
            const std::vector<int> label{labels[j]};
            Tensor x = x0;
            MomentumState state;
            state.g = Tensor(single);
            const Rng img_rng = base.fold(j);
            for (int t = 0; t < cfg.iterations; ++t) {
                const Tensor g_r = refined_gradient(models, x, label, cfg, img_rng.fold(t));
                auto [x_next, next_state] = attack_step(x, x0, g_r, state, cfg);
                x = std::move(x_next);
                state = std::move(next_state);
            }
            std::copy(x.data.begin(), x.data.end(), out.data.begin() + j * per_image);
        }
    });
    return out;
}

} // namespace grf
