#include "grf/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include "binio.hpp"
#include "grf/errors.hpp"
#include "grf/rng.hpp"

namespace grf {

namespace {

constexpr uint32_t kDatasetVersion = 1;
constexpr uint32_t kAdversarialVersion = 1;

// soft inside-step: 1 well inside the shape, 0 outside, ~1.5px transition
inline float soft(float inside_dist) {
    const float v = inside_dist / 1.5f + 0.5f;
    return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
}

// distance from `pos` to the nearest stripe center of the given period
inline float stripe_dist(float pos, float period) {
    const float m = pos - period * std::floor(pos / period);
    return std::min(m, period - m);
}

// Coverage of the class shape at offset (dx, dy) from the jittered center.
// r is the half-size, ph1/ph2 are per-sample phase offsets.
float shape_alpha(int cls, float dx, float dy, float r, float ph1, float ph2) {
    const float ax = std::fabs(dx);
    const float ay = std::fabs(dy);
    const float box = soft(r - std::max(ax, ay));
    switch (cls % 10) {
        case 0:  // filled square
            return box;
        case 1:  // disk
            return soft(r - std::sqrt(dx * dx + dy * dy));
        case 2: {  // ring
            const float rad = std::sqrt(dx * dx + dy * dy);
            return soft(0.30f * r - std::fabs(rad - 0.72f * r));
        }
        case 3: {  // plus
            const float bar_w = 0.34f * r;
            const float horiz = std::min(soft(bar_w - ay), soft(r - ax));
            const float vert = std::min(soft(bar_w - ax), soft(r - ay));
            return std::max(horiz, vert);
        }
        case 4: {  // diagonal cross
            const float bar_w = 0.34f * r;
            const float d1 = std::fabs(dx - dy) * 0.70710678f;
            const float d2 = std::fabs(dx + dy) * 0.70710678f;
            return std::min(box, std::max(soft(bar_w - d1), soft(bar_w - d2)));
        }
        case 5: {  // horizontal stripes
            const float period = std::max(4.0f, 0.55f * r);
            return std::min(box, soft(period * 0.28f - stripe_dist(dy + ph1, period)));
        }
        case 6: {  // vertical stripes
            const float period = std::max(4.0f, 0.55f * r);
            return std::min(box, soft(period * 0.28f - stripe_dist(dx + ph1, period)));
        }
        case 7: {  // diagonal stripes
            const float period = std::max(4.0f, 0.55f * r);
            const float pos = (dx + dy) * 0.70710678f;
            return std::min(box, soft(period * 0.28f - stripe_dist(pos + ph1, period)));
        }
        case 8: {  // checkerboard
            const float cell = std::max(3.0f, 0.5f * r);
            const int px = static_cast<int>(std::floor((dx + ph1) / cell));
            const int py = static_cast<int>(std::floor((dy + ph2) / cell));
            return ((px + py) & 1) ? box : 0.0f;
        }
        default: {  // 9: upward triangle
            // edges: base y = 0.7r, sides from apex (0, -r)
            const float e_base = dy - 0.70f * r;
            // side through (0,-r) and (0.95r, 0.7r): normal ~ (1.7, -0.95)/|.|
            const float inv = 1.0f / std::sqrt(1.7f * 1.7f + 0.95f * 0.95f);
            const float e_right = (1.7f * dx - 0.95f * dy - 0.95f * r) * inv;
            const float e_left = (-1.7f * dx - 0.95f * dy - 0.95f * r) * inv;
            return soft(-std::max({e_base, e_right, e_left}));
        }
    }
}

} // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.classes < 2 || spec.classes > 10) {
        throw std::invalid_argument("generate_synthetic: classes must lie in [2,10]");
    }
    if (spec.n < spec.classes) {
        throw std::invalid_argument("generate_synthetic: need at least one sample per class");
    }
    if (spec.h < 16 || spec.w < 16 || spec.h > 512 || spec.w > 512) {
        throw std::invalid_argument("generate_synthetic: dims must lie in [16,512]");
    }
    Dataset ds;
    ds.class_count = spec.classes;
    ds.images = Tensor(Shape{spec.n, 3, spec.h, spec.w});
    ds.labels.resize(spec.n);
    const Rng base(spec.seed);
    const float min_dim = static_cast<float>(std::min(spec.h, spec.w));

    for (int i = 0; i < spec.n; ++i) {
        const int cls = i % spec.classes;
        ds.labels[i] = cls;
        Rng rng = base.fold(i);

        float bg[3], fg[3];
        for (float& v : bg) {
            v = 0.10f + 0.38f * rng.next_float();
        }
        for (float& v : fg) {
            v = 0.42f + 0.43f * rng.next_float();
        }
        const float cx = 0.5f * spec.w + (rng.next_float() * 2.0f - 1.0f) * 0.14f * spec.w;
        const float cy = 0.5f * spec.h + (rng.next_float() * 2.0f - 1.0f) * 0.14f * spec.h;
        const float r = (0.22f + 0.13f * rng.next_float()) * min_dim;
        const float ph1 = rng.next_float() * 8.0f;
        const float ph2 = rng.next_float() * 8.0f;

        float* img = ds.images.image(i);
        const size_t plane = static_cast<size_t>(spec.h) * spec.w;
        for (int y = 0; y < spec.h; ++y) {
            for (int x = 0; x < spec.w; ++x) {
                const float a = shape_alpha(cls, static_cast<float>(x) - cx,
                                            static_cast<float>(y) - cy, r, ph1, ph2);
                const size_t px = static_cast<size_t>(y) * spec.w + x;
                for (int c = 0; c < 3; ++c) {
                    img[c * plane + px] = bg[c] + a * (fg[c] - bg[c]);
                }
            }
        }
        // per-pixel, per-channel noise
        for (size_t j = 0; j < 3 * plane; ++j) {
            const float noisy = img[j] + (rng.next_float() * 2.0f - 1.0f) * 0.10f;
            img[j] = noisy < 0.0f ? 0.0f : (noisy > 1.0f ? 1.0f : noisy);
        }
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw format_error("cannot open '" + path + "' for writing");
    }
    binio::write_bytes(out, "GRFD", 4);
    binio::write_u32(out, kDatasetVersion);
    binio::write_u32(out, static_cast<uint32_t>(ds.images.shape.n));
    binio::write_u32(out, static_cast<uint32_t>(ds.images.shape.c));
    binio::write_u32(out, static_cast<uint32_t>(ds.images.shape.h));
    binio::write_u32(out, static_cast<uint32_t>(ds.images.shape.w));
    binio::write_u32(out, static_cast<uint32_t>(ds.class_count));
    for (int label : ds.labels) {
        binio::write_u32(out, static_cast<uint32_t>(label));
    }
    binio::write_f32_array(out, ds.images.data.data(), ds.images.size());
    if (!out) {
        throw format_error("write failed for '" + path + "'");
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open '" + path + "' for reading");
    }
    binio::check_magic(in, "GRFD", "dataset file");
    const uint32_t version = binio::read_u32(in, "dataset version");
    if (version != kDatasetVersion) {
        throw format_error("unsupported dataset file version " + std::to_string(version));
    }
    Shape s;
    s.n = static_cast<int>(binio::read_u32(in, "dataset dims"));
    s.c = static_cast<int>(binio::read_u32(in, "dataset dims"));
    s.h = static_cast<int>(binio::read_u32(in, "dataset dims"));
    s.w = static_cast<int>(binio::read_u32(in, "dataset dims"));
    const uint32_t class_count = binio::read_u32(in, "class count");
    if (s.n < 1) {
        throw format_error("dataset file holds no images");
    }
    if (s.c < 1 || s.h < 1 || s.w < 1 || s.numel() > (1ull << 32) || class_count < 1 ||
        class_count > 100000) {
        throw format_error("implausible dataset file header");
    }
    Dataset ds;
    ds.class_count = static_cast<int>(class_count);
    ds.labels.resize(s.n);
    for (int i = 0; i < s.n; ++i) {
        const uint32_t label = binio::read_u32(in, "labels");
        if (label >= class_count) {
            throw format_error("dataset label " + std::to_string(label) +
                               " >= class count " + std::to_string(class_count));
        }
        ds.labels[i] = static_cast<int>(label);
    }
    ds.images = Tensor(s);
    binio::read_f32_array(in, ds.images.data.data(), ds.images.size(), "image data");
    for (float v : ds.images.data) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw format_error("dataset pixel outside [0,1]");
        }
    }
    return ds;
}

Sha256 dataset_hash(const Dataset& ds) {
    std::vector<uint8_t> bytes;
    const size_t label_bytes = ds.labels.size() * 4;
    bytes.reserve(24 + label_bytes + ds.images.size() * 4);
    auto push_u32 = [&bytes](uint32_t v) {
        bytes.push_back(static_cast<uint8_t>(v));
        bytes.push_back(static_cast<uint8_t>(v >> 8));
        bytes.push_back(static_cast<uint8_t>(v >> 16));
        bytes.push_back(static_cast<uint8_t>(v >> 24));
    };
    push_u32(static_cast<uint32_t>(ds.images.shape.n));
    push_u32(static_cast<uint32_t>(ds.images.shape.c));
    push_u32(static_cast<uint32_t>(ds.images.shape.h));
    push_u32(static_cast<uint32_t>(ds.images.shape.w));
    push_u32(static_cast<uint32_t>(ds.class_count));
    for (int label : ds.labels) {
        push_u32(static_cast<uint32_t>(label));
    }
    for (float v : ds.images.data) {
        push_u32(std::bit_cast<uint32_t>(v));
    }
    return sha256(bytes);
}

void save_adversarial(const Tensor& batch, const Sha256& orig_ref_hash, const Sha256& cfg_hash,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw format_error("cannot open '" + path + "' for writing");
    }
    binio::write_bytes(out, "GRFA", 4);
    binio::write_u32(out, kAdversarialVersion);
    binio::write_bytes(out, orig_ref_hash.data(), orig_ref_hash.size());
    binio::write_bytes(out, cfg_hash.data(), cfg_hash.size());
    binio::write_u32(out, static_cast<uint32_t>(batch.shape.n));
    binio::write_u32(out, static_cast<uint32_t>(batch.shape.c));
    binio::write_u32(out, static_cast<uint32_t>(batch.shape.h));
    binio::write_u32(out, static_cast<uint32_t>(batch.shape.w));
    binio::write_f32_array(out, batch.data.data(), batch.size());
    if (!out) {
        throw format_error("write failed for '" + path + "'");
    }
}

AdversarialFile load_adversarial(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open '" + path + "' for reading");
    }
    binio::check_magic(in, "GRFA", "adversarial file");
    const uint32_t version = binio::read_u32(in, "adversarial version");
    if (version != kAdversarialVersion) {
        throw format_error("unsupported adversarial file version " + std::to_string(version));
    }
    AdversarialFile adv;
    binio::read_bytes(in, adv.orig_hash.data(), adv.orig_hash.size(), "dataset hash");
    binio::read_bytes(in, adv.cfg_hash.data(), adv.cfg_hash.size(), "config hash");
    Shape s;
    s.n = static_cast<int>(binio::read_u32(in, "adversarial dims"));
    s.c = static_cast<int>(binio::read_u32(in, "adversarial dims"));
    s.h = static_cast<int>(binio::read_u32(in, "adversarial dims"));
    s.w = static_cast<int>(binio::read_u32(in, "adversarial dims"));
    if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1 || s.numel() > (1ull << 32)) {
        throw format_error("implausible adversarial file header");
    }
    adv.batch = Tensor(s);
    binio::read_f32_array(in, adv.batch.data.data(), adv.batch.size(), "adversarial data");
    if (!adv.batch.all_finite()) {
        throw format_error("adversarial file contains non-finite values");
    }
    return adv;
}

bool verify_provenance(const AdversarialFile& adv, const Sha256& expected_orig,
                       Provenance mode) {
    if (adv.orig_hash == expected_orig) {
        return true;
    }
    const std::string msg = "adversarial batch provenance mismatch: file hash " +
                            to_hex(adv.orig_hash) + " vs dataset hash " +
                            to_hex(expected_orig);
    if (mode == Provenance::strict) {
        throw provenance_error(msg);
    }
    std::cerr << "warning: " << msg << "\n";
    return false;
}

} // namespace grf
