#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grf/hash.hpp"
#include "grf/tensor.hpp"

namespace grf {

/// Labeled image batch in [0,1]. The split tag is in-memory bookkeeping
/// only; the on-disk format does not carry it.
struct Dataset {
    Tensor images;            // (n, c, h, w)
    std::vector<int> labels;  // length n, each < class_count
    int class_count = 0;
    std::string split = "train";

    int size() const { return images.shape.n; }
};

struct SyntheticSpec {
    int n = 0;
    int classes = 10;
    int h = 32;
    int w = 32;
    uint64_t seed = 0;
};

/// Deterministic class-conditional images: one geometric base pattern per
/// class, randomly colored, jittered and noised per sample. Labels are
/// balanced (sample i gets class i % classes).
Dataset generate_synthetic(const SyntheticSpec& spec);

// Dataset file ("GRFD"): magic, version u32, n,c,h,w u32, class_count u32,
// labels u32[n], images f32[n*c*h*w]. All little-endian.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/// SHA-256 over the canonical dataset payload (dims, class count, labels,
/// image bytes) -- identifies the dataset independent of its file path.
Sha256 dataset_hash(const Dataset& ds);

// Adversarial batch file ("GRFA"): magic, version u32, source-dataset hash
// (32 bytes), attack-config hash (32 bytes), n,c,h,w u32, f32 data.
void save_adversarial(const Tensor& batch, const Sha256& orig_ref_hash, const Sha256& cfg_hash,
                      const std::string& path);

struct AdversarialFile {
    Tensor batch;
    Sha256 orig_hash{};
    Sha256 cfg_hash{};
};

AdversarialFile load_adversarial(const std::string& path);

enum class Provenance { strict, tolerant };

/// Check a loaded adversarial batch against the dataset it claims to come
/// from. strict: throws provenance_error on mismatch. tolerant: logs a
/// warning to stderr and returns false.
bool verify_provenance(const AdversarialFile& adv, const Sha256& expected_orig,
                       Provenance mode);

} // namespace grf
