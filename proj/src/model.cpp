#include "grf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "binio.hpp"
#include "grf/errors.hpp"
#include "grf/kernels.hpp"
#include "grf/parallel.hpp"
#include "grf/rng.hpp"

namespace grf {

ArchId parse_arch(const std::string& name) {
    if (name == "cnn_a") return ArchId::cnn_a;
    if (name == "cnn_b") return ArchId::cnn_b;
    if (name == "mlp") return ArchId::mlp;
    throw std::invalid_argument("unknown architecture '" + name +
                                "' (valid: cnn_a, cnn_b, mlp)");
}

std::string arch_name(ArchId arch) {
    switch (arch) {
        case ArchId::cnn_a: return "cnn_a";
        case ArchId::cnn_b: return "cnn_b";
        case ArchId::mlp: return "mlp";
    }
    throw std::invalid_argument("bad ArchId");
}

namespace {

struct LayerDef {
    enum class Kind { conv, relu, pool, dense };
    Kind kind;
    int in_c = 0, in_h = 0, in_w = 0;   // incoming per-image dims
    int out_c = 0, out_h = 0, out_w = 0;
    int ksize = 0;                      // conv only
    int w_param = -1, b_param = -1;     // indices into Classifier::params
};

struct ParamSpec {
    std::string name;
    Shape shape;
};

struct Plan {
    std::vector<LayerDef> layers;
    std::vector<ParamSpec> params;
};

Plan build_plan(ArchId arch, int num_classes, int in_c, int in_h, int in_w) {
    if (num_classes < 2) {
        throw std::invalid_argument("num_classes must be >= 2");
    }
    if (in_c < 1 || in_h < 1 || in_w < 1) {
        throw std::invalid_argument("invalid input spec");
    }
    Plan plan;
    int c = in_c, h = in_h, w = in_w;

    auto conv = [&](int out_c, int k, const std::string& name) {
        LayerDef l;
        l.kind = LayerDef::Kind::conv;
        l.in_c = c; l.in_h = h; l.in_w = w;
        l.out_c = out_c; l.out_h = h; l.out_w = w;
        l.ksize = k;
        l.w_param = static_cast<int>(plan.params.size());
        plan.params.push_back({name + ".w", Shape{out_c, c, k, k}});
        l.b_param = static_cast<int>(plan.params.size());
        plan.params.push_back({name + ".b", Shape{out_c, 1, 1, 1}});
        plan.layers.push_back(l);
        c = out_c;
    };
    auto relu = [&] {
        LayerDef l;
        l.kind = LayerDef::Kind::relu;
        l.in_c = c; l.in_h = h; l.in_w = w;
        l.out_c = c; l.out_h = h; l.out_w = w;
        plan.layers.push_back(l);
    };
    auto pool = [&] {
        if (h % 2 != 0 || w % 2 != 0) {
            throw std::invalid_argument("input dims not divisible for 2x2 pooling");
        }
        LayerDef l;
        l.kind = LayerDef::Kind::pool;
        l.in_c = c; l.in_h = h; l.in_w = w;
        l.out_c = c; l.out_h = h / 2; l.out_w = w / 2;
        plan.layers.push_back(l);
        h /= 2;
        w /= 2;
    };
    auto dense = [&](int out_dim, const std::string& name) {
        LayerDef l;
        l.kind = LayerDef::Kind::dense;
        l.in_c = c; l.in_h = h; l.in_w = w;
        l.out_c = out_dim; l.out_h = 1; l.out_w = 1;
        l.w_param = static_cast<int>(plan.params.size());
        plan.params.push_back({name + ".w", Shape{out_dim, c * h * w, 1, 1}});
        l.b_param = static_cast<int>(plan.params.size());
        plan.params.push_back({name + ".b", Shape{out_dim, 1, 1, 1}});
        plan.layers.push_back(l);
        c = out_dim;
        h = 1;
        w = 1;
    };

    switch (arch) {
        case ArchId::cnn_a:
            conv(8, 3, "conv1");
            relu();
            pool();
            conv(16, 3, "conv2");
            relu();
            pool();
            dense(num_classes, "fc");
            break;
        case ArchId::cnn_b:
            conv(16, 5, "conv1");
            relu();
            pool();
            dense(64, "fc1");
            relu();
            dense(num_classes, "fc2");
            break;
        case ArchId::mlp:
            dense(128, "fc1");
            relu();
            dense(num_classes, "fc2");
            break;
    }
    return plan;
}

// Per-image activations of one forward pass, kept for the backward walk.
struct Workspace {
    std::vector<Tensor> acts;                   // acts[0] = input, acts[i+1] = layer i output
    std::vector<std::vector<int32_t>> pool_idx; // parallel to layers; empty unless pool
};

void forward_ws(const Classifier& model, const Plan& plan, const Tensor& x, Workspace& ws) {
    const auto& k = kernels::active_backend();
    const int n = x.shape.n;
    ws.acts.clear();
    ws.pool_idx.assign(plan.layers.size(), {});
    ws.acts.reserve(plan.layers.size() + 1);
    ws.acts.push_back(x);
    for (size_t li = 0; li < plan.layers.size(); ++li) {
        const LayerDef& l = plan.layers[li];
        const Tensor& in = ws.acts.back();
        Tensor out(Shape{n, l.out_c, l.out_h, l.out_w});
        switch (l.kind) {
            case LayerDef::Kind::conv: {
                const Tensor& wgt = model.params[l.w_param].value;
                const Tensor& bias = model.params[l.b_param].value;
                for (int i = 0; i < n; ++i) {
                    k.conv2d_fwd(in.image(i), l.in_c, l.in_h, l.in_w, wgt.data.data(), l.out_c,
                                 l.ksize, bias.data.data(), out.image(i));
                }
                break;
            }
            case LayerDef::Kind::relu:
                k.relu_fwd(in.data.data(), in.size(), out.data.data());
                break;
            case LayerDef::Kind::pool: {
                ws.pool_idx[li].resize(static_cast<size_t>(n) * l.out_c * l.out_h * l.out_w);
                const size_t out_plane = static_cast<size_t>(l.out_c) * l.out_h * l.out_w;
                for (int i = 0; i < n; ++i) {
                    k.maxpool2_fwd(in.image(i), l.in_c, l.in_h, l.in_w, out.image(i),
                                   ws.pool_idx[li].data() + static_cast<size_t>(i) * out_plane);
                }
                break;
            }
            case LayerDef::Kind::dense: {
                const Tensor& wgt = model.params[l.w_param].value;
                const Tensor& bias = model.params[l.b_param].value;
                const int in_dim = l.in_c * l.in_h * l.in_w;
                for (int i = 0; i < n; ++i) {
                    k.dense_fwd(in.image(i), in_dim, wgt.data.data(), l.out_c, bias.data.data(),
                                out.image(i));
                }
                break;
            }
        }
        ws.acts.push_back(std::move(out));
    }
}

// Weights flipped spatially with in/out channels swapped: convolving dY with
// them (same padding) yields dX exactly for stride-1 same-padded conv.
Tensor transpose_conv_weights(const Tensor& wgt) {
    const int oc = wgt.shape.n, ic = wgt.shape.c, k = wgt.shape.h;
    Tensor t(Shape{ic, oc, k, k});
    for (int o = 0; o < oc; ++o) {
        for (int i = 0; i < ic; ++i) {
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) {
                    t.at(i, o, a, b) = wgt.at(o, i, k - 1 - a, k - 1 - b);
                }
            }
        }
    }
    return t;
}

// Backward walk from dlogits to dinput. When grads != nullptr, parameter
// gradients accumulate into (*grads)[param index].
Tensor backward_ws(const Classifier& model, const Plan& plan, const Workspace& ws,
                   const Tensor& dlogits, std::vector<Tensor>* grads) {
    const auto& k = kernels::active_backend();
    const int n = dlogits.shape.n;
    Tensor d = dlogits;
    for (int li = static_cast<int>(plan.layers.size()) - 1; li >= 0; --li) {
        const LayerDef& l = plan.layers[li];
        const Tensor& in = ws.acts[li];
        Tensor dx(Shape{n, l.in_c, l.in_h, l.in_w});
        switch (l.kind) {
            case LayerDef::Kind::conv: {
                const Tensor& wgt = model.params[l.w_param].value;
                const Tensor wt = transpose_conv_weights(wgt);
                for (int i = 0; i < n; ++i) {
                    k.conv2d_fwd(d.image(i), l.out_c, l.out_h, l.out_w, wt.data.data(), l.in_c,
                                 l.ksize, nullptr, dx.image(i));
                }
                if (grads) {
                    Tensor& dw = (*grads)[l.w_param];
                    Tensor& db = (*grads)[l.b_param];
                    for (int i = 0; i < n; ++i) {
                        k.conv2d_dweights(in.image(i), l.in_c, l.in_h, l.in_w, d.image(i),
                                          l.out_c, l.ksize, dw.data.data(), db.data.data());
                    }
                }
                break;
            }
            case LayerDef::Kind::relu:
                k.relu_bwd(in.data.data(), d.data.data(), in.size(), dx.data.data());
                break;
            case LayerDef::Kind::pool: {
                const size_t out_plane = static_cast<size_t>(l.out_c) * l.out_h * l.out_w;
                for (int i = 0; i < n; ++i) {
                    k.maxpool2_bwd(d.image(i), l.in_c, l.in_h, l.in_w,
                                   ws.pool_idx[li].data() + static_cast<size_t>(i) * out_plane,
                                   dx.image(i));
                }
                break;
            }
            case LayerDef::Kind::dense: {
                const Tensor& wgt = model.params[l.w_param].value;
                const int in_dim = l.in_c * l.in_h * l.in_w;
                for (int i = 0; i < n; ++i) {
                    k.dense_dinput(d.image(i), l.out_c, wgt.data.data(), in_dim, dx.image(i));
                }
                if (grads) {
                    Tensor& dw = (*grads)[l.w_param];
                    Tensor& db = (*grads)[l.b_param];
                    for (int i = 0; i < n; ++i) {
                        k.dense_dweights(in.image(i), in_dim, d.image(i), l.out_c,
                                         dw.data.data(), db.data.data());
                    }
                }
                break;
            }
        }
        d = std::move(dx);
    }
    return d;
}

Plan plan_of(const Classifier& model) {
    return build_plan(model.arch, model.num_classes, model.in_c, model.in_h, model.in_w);
}

void check_input(const Classifier& model, const Tensor& x) {
    if (x.shape.n < 1 || x.shape.c != model.in_c || x.shape.h != model.in_h ||
        x.shape.w != model.in_w) {
        throw std::invalid_argument("input shape " + x.shape.str() + " does not match " +
                                    arch_name(model.arch) + " input spec (" +
                                    std::to_string(model.in_c) + "," +
                                    std::to_string(model.in_h) + "," +
                                    std::to_string(model.in_w) + ")");
    }
}

Tensor slice_batch(const Tensor& x, size_t begin, size_t end) {
    Tensor out(Shape{static_cast<int>(end - begin), x.shape.c, x.shape.h, x.shape.w});
    std::copy(x.image(static_cast<int>(begin)),
              x.image(static_cast<int>(begin)) + out.size(), out.data.data());
    return out;
}

} // namespace

Classifier make_classifier(ArchId arch, int num_classes, int in_c, int in_h, int in_w,
                           uint64_t seed) {
    const Plan plan = build_plan(arch, num_classes, in_c, in_h, in_w);
    Classifier model;
    model.arch = arch;
    model.num_classes = num_classes;
    model.in_c = in_c;
    model.in_h = in_h;
    model.in_w = in_w;
    const Rng base(seed);
    for (size_t pi = 0; pi < plan.params.size(); ++pi) {
        const ParamSpec& spec = plan.params[pi];
        Param p;
        p.name = spec.name;
        p.value = Tensor(spec.shape);
        const bool is_weight = spec.name.back() == 'w';
        if (is_weight) {
            // Glorot-uniform
            int fan_in, fan_out;
            if (spec.shape.h > 1) {  // conv weight (oc, ic, k, k)
                fan_in = spec.shape.c * spec.shape.h * spec.shape.w;
                fan_out = spec.shape.n * spec.shape.h * spec.shape.w;
            } else {  // dense weight (out, in, 1, 1)
                fan_in = spec.shape.c;
                fan_out = spec.shape.n;
            }
            const float limit = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
            Rng stream = base.fold(0).fold(pi);
            for (float& v : p.value.data) {
                v = (stream.next_float() * 2.0f - 1.0f) * limit;
            }
        }
        model.params.push_back(std::move(p));
    }
    return model;
}

Tensor forward(const Classifier& model, const Tensor& x) {
    check_input(model, x);
    const Plan plan = plan_of(model);
    Tensor logits(Shape{x.shape.n, model.num_classes, 1, 1});
    parallel_for(static_cast<size_t>(x.shape.n), [&](size_t begin, size_t end) {
        Workspace ws;
        const Tensor chunk = slice_batch(x, begin, end);
        forward_ws(model, plan, chunk, ws);
        std::copy(ws.acts.back().data.begin(), ws.acts.back().data.end(),
                  logits.data.begin() + begin * model.num_classes);
    });
    return logits;
}

Tensor input_gradient(const Classifier& model, const Tensor& x, const std::vector<int>& labels) {
    check_input(model, x);
    if (labels.size() != static_cast<size_t>(x.shape.n)) {
        throw std::invalid_argument("input_gradient: batch/label count mismatch");
    }
    for (int label : labels) {
        if (label < 0 || label >= model.num_classes) {
            throw std::invalid_argument("input_gradient: label out of range");
        }
    }
    const Plan plan = plan_of(model);
    Tensor dx(x.shape);
    const double inv_n = 1.0 / x.shape.n;
    parallel_for(static_cast<size_t>(x.shape.n), [&](size_t begin, size_t end) {
        Workspace ws;
        const Tensor chunk = slice_batch(x, begin, end);
        forward_ws(model, plan, chunk, ws);
        const Tensor& logits = ws.acts.back();
        // dlogits of the *batch-mean* loss: each image's slice only depends
        // on its own logits and the global batch size, so chunking is safe.
        Tensor dlogits(logits.shape);
        const int classes = model.num_classes;
        for (int i = 0; i < chunk.shape.n; ++i) {
            const float* z = logits.image(i);
            float* dz = dlogits.image(i);
            const int label = labels[begin + i];
            double zmax = z[0];
            for (int j = 1; j < classes; ++j) {
                zmax = std::max(zmax, static_cast<double>(z[j]));
            }
            double se = 0.0;
            for (int j = 0; j < classes; ++j) {
                se += std::exp(static_cast<double>(z[j]) - zmax);
            }
            for (int j = 0; j < classes; ++j) {
                const double p = std::exp(static_cast<double>(z[j]) - zmax) / se;
                dz[j] = static_cast<float>((p - (j == label ? 1.0 : 0.0)) * inv_n);
            }
        }
        const Tensor dchunk = backward_ws(model, plan, ws, dlogits, nullptr);
        std::copy(dchunk.data.begin(), dchunk.data.end(),
                  dx.data.begin() + begin * x.shape.image_numel());
    });
    return dx;
}

double mean_loss(const Classifier& model, const Tensor& x, const std::vector<int>& labels) {
    return softmax_cross_entropy(forward(model, x), labels).loss;
}

double accuracy(const Classifier& model, const Tensor& images, const std::vector<int>& labels) {
    if (images.shape.n < 1) {
        throw std::invalid_argument("accuracy: empty batch");
    }
    const Tensor logits = forward(model, images);
    int correct = 0;
    for (int i = 0; i < images.shape.n; ++i) {
        const float* z = logits.image(i);
        int best = 0;
        for (int j = 1; j < model.num_classes; ++j) {
            if (z[j] > z[best]) {
                best = j;
            }
        }
        correct += (best == labels[i]) ? 1 : 0;
    }
    return static_cast<double>(correct) / images.shape.n;
}

Classifier train(ArchId arch, const Dataset& dataset, const TrainSpec& spec) {
    if (dataset.size() == 0) {
        throw std::invalid_argument("train: empty dataset");
    }
    if (spec.epochs < 1 || spec.batch_size < 1 || !(spec.learning_rate > 0.0f)) {
        throw std::invalid_argument("train: invalid TrainSpec");
    }
    for (int label : dataset.labels) {
        if (label < 0 || label >= dataset.class_count) {
            throw std::invalid_argument("train: label out of range");
        }
    }
    const Shape in = dataset.images.shape;
    Classifier model =
        make_classifier(arch, dataset.class_count, in.c, in.h, in.w, spec.seed);
    const Plan plan = plan_of(model);
    const auto& k = kernels::active_backend();
    const Rng base(spec.seed);
    const int n = dataset.size();

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Tensor> grads;
    for (const Param& p : model.params) {
        grads.emplace_back(p.value.shape);
    }

    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        Rng shuffle = base.fold(1).fold(epoch);
        for (int i = n - 1; i > 0; --i) {
            std::swap(order[i], order[shuffle.uniform_int(0, i)]);
        }
        for (int start = 0; start < n; start += spec.batch_size) {
            const int bs = std::min(spec.batch_size, n - start);
            Tensor xb(Shape{bs, in.c, in.h, in.w});
            std::vector<int> yb(bs);
            for (int i = 0; i < bs; ++i) {
                const int src = order[start + i];
                std::copy(dataset.images.image(src),
                          dataset.images.image(src) + in.image_numel(), xb.image(i));
                yb[i] = dataset.labels[src];
            }
            Workspace ws;
            forward_ws(model, plan, xb, ws);
            const SoftmaxCeResult ce = softmax_cross_entropy(ws.acts.back(), yb);
            for (Tensor& g : grads) {
                std::fill(g.data.begin(), g.data.end(), 0.0f);
            }
            backward_ws(model, plan, ws, ce.dlogits, &grads);
            for (size_t pi = 0; pi < model.params.size(); ++pi) {
                k.axpy(-spec.learning_rate, grads[pi].data.data(), grads[pi].size(),
                       model.params[pi].value.data.data());
            }
        }
    }
    model.final_train_accuracy =
        static_cast<float>(accuracy(model, dataset.images, dataset.labels));
    return model;
}

namespace {
constexpr uint32_t kWeightsVersion = 1;

// The weight format stores no input dims; they are re-derived from the
// parameter shapes assuming square spatial inputs.
bool derive_input(ArchId arch, const std::vector<ParamSpec>& got, int num_classes, int* in_c,
                  int* in_h, int* in_w) {
    (void)num_classes;
    auto square_side = [](int area) {
        const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(area))));
        return (s > 0 && s * s == area) ? s : 0;
    };
    switch (arch) {
        case ArchId::cnn_a: {
            if (got.size() < 6) return false;
            const Shape conv1 = got[0].shape;   // (8, c, 3, 3)
            const Shape fc = got[4].shape;      // (classes, 16*(h/4)*(w/4), 1, 1)
            if (fc.c % 16 != 0) return false;
            const int side = square_side(fc.c / 16);
            if (side == 0) return false;
            *in_c = conv1.c;
            *in_h = *in_w = side * 4;
            return true;
        }
        case ArchId::cnn_b: {
            if (got.size() < 4) return false;
            const Shape conv1 = got[0].shape;   // (16, c, 5, 5)
            const Shape fc1 = got[2].shape;     // (64, 16*(h/2)*(w/2), 1, 1)
            if (fc1.c % 16 != 0) return false;
            const int side = square_side(fc1.c / 16);
            if (side == 0) return false;
            *in_c = conv1.c;
            *in_h = *in_w = side * 2;
            return true;
        }
        case ArchId::mlp: {
            if (got.empty()) return false;
            const int flat = got[0].shape.c;    // c*h*w
            if (flat % 3 == 0) {
                const int side = square_side(flat / 3);
                if (side > 0) {
                    *in_c = 3;
                    *in_h = *in_w = side;
                    return true;
                }
            }
            const int side = square_side(flat);
            if (side == 0) return false;
            *in_c = 1;
            *in_h = *in_w = side;
            return true;
        }
    }
    return false;
}
} // namespace

void save_classifier(const Classifier& model, const std::string& path) {
    // Guard round-trippability up front: the loader must be able to re-derive
    // the input spec from parameter shapes alone.
    {
        std::vector<ParamSpec> specs;
        for (const Param& p : model.params) {
            specs.push_back({p.name, p.value.shape});
        }
        int c = 0, h = 0, w = 0;
        if (!derive_input(model.arch, specs, model.num_classes, &c, &h, &w) ||
            c != model.in_c || h != model.in_h || w != model.in_w) {
            throw std::invalid_argument(
                "save_classifier: weight format only represents square inputs");
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw format_error("cannot open '" + path + "' for writing");
    }
    binio::write_bytes(out, "GRFW", 4);
    binio::write_u32(out, kWeightsVersion);
    binio::write_string(out, arch_name(model.arch));
    binio::write_u32(out, static_cast<uint32_t>(model.num_classes));
    binio::write_u32(out, static_cast<uint32_t>(model.params.size()));
    for (const Param& p : model.params) {
        binio::write_string(out, p.name);
        binio::write_u32(out, static_cast<uint32_t>(p.value.shape.n));
        binio::write_u32(out, static_cast<uint32_t>(p.value.shape.c));
        binio::write_u32(out, static_cast<uint32_t>(p.value.shape.h));
        binio::write_u32(out, static_cast<uint32_t>(p.value.shape.w));
        binio::write_f32_array(out, p.value.data.data(), p.value.size());
    }
    if (!out) {
        throw format_error("write failed for '" + path + "'");
    }
}

Classifier load_classifier(const std::string& path, std::optional<ArchId> expected_arch) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open '" + path + "' for reading");
    }
    binio::check_magic(in, "GRFW", "weight file");
    const uint32_t version = binio::read_u32(in, "weight version");
    if (version != kWeightsVersion) {
        throw format_error("unsupported weight file version " + std::to_string(version));
    }
    const std::string tag = binio::read_string(in, 64, "arch tag");
    ArchId arch;
    try {
        arch = parse_arch(tag);
    } catch (const std::invalid_argument&) {
        throw format_error("weight file holds unknown architecture tag '" + tag + "'");
    }
    if (expected_arch && *expected_arch != arch) {
        throw format_error("expected architecture '" + arch_name(*expected_arch) +
                           "' but file holds '" + tag + "'");
    }
    const uint32_t num_classes = binio::read_u32(in, "num_classes");
    const uint32_t param_count = binio::read_u32(in, "param count");
    if (num_classes < 2 || num_classes > 4096 || param_count > 64) {
        throw format_error("implausible weight file header");
    }
    std::vector<Param> params;
    std::vector<ParamSpec> specs;
    for (uint32_t i = 0; i < param_count; ++i) {
        Param p;
        p.name = binio::read_string(in, 128, "param name");
        Shape s;
        s.n = static_cast<int>(binio::read_u32(in, "param shape"));
        s.c = static_cast<int>(binio::read_u32(in, "param shape"));
        s.h = static_cast<int>(binio::read_u32(in, "param shape"));
        s.w = static_cast<int>(binio::read_u32(in, "param shape"));
        if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1 || s.numel() > (1u << 28)) {
            throw format_error("bad parameter shape in weight file");
        }
        p.value = Tensor(s);
        binio::read_f32_array(in, p.value.data.data(), p.value.size(), "param data");
        specs.push_back({p.name, s});
        params.push_back(std::move(p));
    }

    int in_c = 0, in_h = 0, in_w = 0;
    if (!derive_input(arch, specs, static_cast<int>(num_classes), &in_c, &in_h, &in_w)) {
        throw format_error("cannot derive input spec from weight file parameters");
    }
    const Plan plan = build_plan(arch, static_cast<int>(num_classes), in_c, in_h, in_w);
    if (plan.params.size() != params.size()) {
        throw format_error("weight file parameter count does not match architecture");
    }
    for (size_t i = 0; i < params.size(); ++i) {
        if (params[i].name != plan.params[i].name ||
            params[i].value.shape != plan.params[i].shape) {
            throw format_error("weight file parameter '" + params[i].name +
                               "' does not match architecture layout");
        }
        if (!params[i].value.all_finite()) {
            throw format_error("weight file parameter '" + params[i].name +
                               "' contains non-finite values");
        }
    }

    Classifier model;
    model.arch = arch;
    model.num_classes = static_cast<int>(num_classes);
    model.in_c = in_c;
    model.in_h = in_h;
    model.in_w = in_w;
    model.params = std::move(params);
    return model;
}

} // namespace grf
