#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grf/dataio.hpp"
#include "grf/tensor.hpp"

namespace grf {

enum class ArchId { cnn_a, cnn_b, mlp };

ArchId parse_arch(const std::string& name);
std::string arch_name(ArchId arch);

struct TrainSpec {
    int epochs = 12;
    int batch_size = 32;
    float learning_rate = 0.08f;
    uint64_t seed = 0;
};

struct Param {
    std::string name;
    Tensor value;
};

/// Fixed-architecture classifier. Immutable after training or loading;
/// forward and input_gradient are re-entrant.
///
/// cnn_a: conv(3->8,3x3)/relu/maxpool2/conv(8->16,3x3)/relu/maxpool2/dense
/// cnn_b: conv(3->16,5x5)/relu/maxpool2/dense->64/relu/dense
/// mlp:   flatten/dense->128/relu/dense
struct Classifier {
    ArchId arch = ArchId::cnn_a;
    int num_classes = 0;
    int in_c = 0, in_h = 0, in_w = 0;
    std::vector<Param> params;
    float final_train_accuracy = -1.0f;  // recorded by train(), not persisted
};

/// Randomly initialized classifier (uniform Glorot weights, zero biases),
/// deterministic in the seed.
Classifier make_classifier(ArchId arch, int num_classes, int in_c, int in_h, int in_w,
                           uint64_t seed);

/// Logits of shape (n, num_classes, 1, 1). Pure; identical inputs give
/// bitwise-identical outputs. Per-image work may run in parallel, results
/// are independent of the worker count.
Tensor forward(const Classifier& model, const Tensor& x);

/// Exact gradient of the mean cross-entropy loss w.r.t. the input batch.
Tensor input_gradient(const Classifier& model, const Tensor& x, const std::vector<int>& labels);

/// Mean cross-entropy of the batch under the model (f64 accumulation).
double mean_loss(const Classifier& model, const Tensor& x, const std::vector<int>& labels);

/// Fraction of images whose argmax logit equals the label (ties -> lowest
/// class index).
double accuracy(const Classifier& model, const Tensor& images, const std::vector<int>& labels);

/// Plain SGD with seeded shuffling; bitwise deterministic in the TrainSpec.
/// Single-threaded so gradient accumulation order is fixed.
Classifier train(ArchId arch, const Dataset& dataset, const TrainSpec& spec);

// Weight file ("GRFW"): magic, version u32, arch tag (u32 length + ASCII),
// num_classes u32, param count u32, then per parameter: name (u32 length +
// ASCII), 4 x u32 shape, raw little-endian f32 data.
void save_classifier(const Classifier& model, const std::string& path);

/// Loads and validates a weight file. If expected_arch is given and the file
/// holds a different architecture, throws format_error naming both tags.
Classifier load_classifier(const std::string& path,
                           std::optional<ArchId> expected_arch = std::nullopt);

} // namespace grf
