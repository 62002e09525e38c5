#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "grf/dataio.hpp"
#include "grf/errors.hpp"
#include "grf/model.hpp"
#include "grf/rng.hpp"
#include "reference_net.hpp"
#include "test_util.hpp"

using namespace grf;
using testutil::bitwise_equal;
using testutil::random_tensor;
using testutil::TempDir;

namespace {

bool params_bitwise_equal(const Classifier& a, const Classifier& b) {
    if (a.params.size() != b.params.size()) {
        return false;
    }
    for (size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].name != b.params[i].name ||
            !bitwise_equal(a.params[i].value, b.params[i].value)) {
            return false;
        }
    }
    return true;
}

// 20 central-difference probes (step 1e-3, double-precision reference
// forward) against the analytic input gradient
void check_input_gradient(ArchId arch, int h, int w) {
    Rng rng(417);
    const Classifier model = make_classifier(arch, 5, 3, h, w, 90001);
    const Tensor x = random_tensor(Shape{2, 3, h, w}, rng, 0.05f, 0.95f);
    const std::vector<int> labels = {1, 4};
    const Tensor g = input_gradient(model, x, labels);
    const double step = 1e-3;
    int checked = 0;
    size_t i = 1;
    while (checked < 20 && i < x.data.size()) {
        if (std::fabs(g.data[i]) > 1e-5) {
            Tensor up = x;
            Tensor dn = x;
            up.data[i] += static_cast<float>(step);
            dn.data[i] -= static_cast<float>(step);
            const double fd = (refnet::mean_loss(model, up, labels) -
                               refnet::mean_loss(model, dn, labels)) /
                              (2.0 * step);
            const double rel =
                std::fabs(fd - g.data[i]) / std::max(std::fabs(fd), static_cast<double>(std::fabs(g.data[i])));
            CHECK(rel <= 1e-3);
            ++checked;
        }
        i += 11;
    }
    CHECK(checked == 20);
}

} // namespace

TEST_CASE("forward: zeroed head gives equal logits") {
    Classifier model = make_classifier(ArchId::cnn_a, 10, 3, 32, 32, 5);
    // zero the final dense layer
    auto& fw = model.params[model.params.size() - 2].value;
    auto& fb = model.params[model.params.size() - 1].value;
    std::fill(fw.data.begin(), fw.data.end(), 0.0f);
    std::fill(fb.data.begin(), fb.data.end(), 0.0f);
    const Tensor x(Shape{1, 3, 32, 32});  // zero image
    const Tensor logits = forward(model, x);
    for (float v : logits.data) {
        CHECK(v == 0.0f);
    }
}

TEST_CASE("forward: identical images give identical rows, repeat calls identical bits") {
    Rng rng(6);
    const Classifier model = make_classifier(ArchId::cnn_b, 7, 3, 16, 16, 42);
    const Tensor one = random_tensor(Shape{1, 3, 16, 16}, rng, 0.0f, 1.0f);
    Tensor two(Shape{2, 3, 16, 16});
    std::copy(one.data.begin(), one.data.end(), two.image(0));
    std::copy(one.data.begin(), one.data.end(), two.image(1));
    const Tensor logits = forward(model, two);
    for (int j = 0; j < 7; ++j) {
        CHECK(logits.at(0, j, 0, 0) == logits.at(1, j, 0, 0));
    }
    CHECK(bitwise_equal(forward(model, two), logits));
}

TEST_CASE("forward rejects wrong input shape") {
    const Classifier model = make_classifier(ArchId::mlp, 4, 3, 16, 16, 1);
    CHECK_THROWS_AS(forward(model, Tensor(Shape{1, 3, 8, 8})), std::invalid_argument);
}

TEST_CASE("input gradient matches finite differences (cnn_a)") {
    check_input_gradient(ArchId::cnn_a, 16, 16);
}
TEST_CASE("input gradient matches finite differences (cnn_b)") {
    check_input_gradient(ArchId::cnn_b, 16, 16);
}
TEST_CASE("input gradient matches finite differences (mlp)") {
    check_input_gradient(ArchId::mlp, 16, 16);
}

TEST_CASE("input gradient: duplicated image gives identical slices") {
    Rng rng(7);
    const Classifier model = make_classifier(ArchId::cnn_a, 6, 3, 16, 16, 11);
    const Tensor one = random_tensor(Shape{1, 3, 16, 16}, rng, 0.0f, 1.0f);
    Tensor three(Shape{3, 3, 16, 16});
    std::copy(one.data.begin(), one.data.end(), three.image(0));
    std::copy(one.data.begin(), one.data.end(), three.image(1));
    const Tensor other = random_tensor(Shape{1, 3, 16, 16}, rng, 0.0f, 1.0f);
    std::copy(other.data.begin(), other.data.end(), three.image(2));
    const Tensor g = input_gradient(model, three, {2, 2, 4});
    const size_t per = three.shape.image_numel();
    for (size_t i = 0; i < per; ++i) {
        CHECK(g.data[i] == g.data[per + i]);
    }
}

TEST_CASE("input gradient vanishes when the two class rows coincide") {
    Classifier model = make_classifier(ArchId::mlp, 2, 3, 16, 16, 21);
    Tensor& fw = model.params[model.params.size() - 2].value;  // (2, 128, 1, 1)
    Tensor& fb = model.params[model.params.size() - 1].value;
    for (int i = 0; i < fw.shape.c; ++i) {
        fw.at(1, i, 0, 0) = fw.at(0, i, 0, 0);
    }
    fb.data[1] = fb.data[0];
    Rng rng(8);
    const Tensor x = random_tensor(Shape{2, 3, 16, 16}, rng, 0.0f, 1.0f);
    const Tensor g = input_gradient(model, x, {0, 1});
    for (float v : g.data) {
        CHECK(v == 0.0f);
    }
}

TEST_CASE("train: deterministic, seed-sensitive, loss decreases") {
    SyntheticSpec dspec;
    dspec.n = 40;
    dspec.classes = 4;
    dspec.h = dspec.w = 16;
    dspec.seed = 3;
    const Dataset ds = generate_synthetic(dspec);

    TrainSpec tspec;
    tspec.epochs = 1;
    tspec.batch_size = 8;
    tspec.learning_rate = 0.05f;
    tspec.seed = 9;

    const Classifier m1 = train(ArchId::cnn_a, ds, tspec);
    const Classifier m2 = train(ArchId::cnn_a, ds, tspec);
    CHECK(params_bitwise_equal(m1, m2));

    TrainSpec other = tspec;
    other.seed = 10;
    const Classifier m3 = train(ArchId::cnn_a, ds, other);
    CHECK(!params_bitwise_equal(m1, m3));

    const Classifier init = make_classifier(ArchId::cnn_a, ds.class_count, 3, 16, 16, tspec.seed);
    const double before = mean_loss(init, ds.images, ds.labels);
    const double after = mean_loss(m1, ds.images, ds.labels);
    CHECK(after < before);
    CHECK(m1.final_train_accuracy >= 0.0f);
}

TEST_CASE("train rejects an empty dataset") {
    Dataset empty;
    empty.class_count = 2;
    CHECK_THROWS_AS(train(ArchId::mlp, empty, TrainSpec{}), std::invalid_argument);
}

TEST_CASE("trained cnn_a fits its training split") {
    SyntheticSpec dspec;
    dspec.n = 400;
    dspec.classes = 10;
    dspec.seed = 12;
    const Dataset ds = generate_synthetic(dspec);
    TrainSpec tspec;
    tspec.epochs = 30;
    tspec.learning_rate = 0.1f;
    tspec.seed = 4;
    const Classifier model = train(ArchId::cnn_a, ds, tspec);
    CHECK(model.final_train_accuracy >= 0.9f);
}

TEST_CASE("weight files round-trip bitwise") {
    TempDir dir("weights");
    SyntheticSpec dspec;
    dspec.n = 20;
    dspec.classes = 2;
    dspec.h = dspec.w = 16;
    dspec.seed = 5;
    const Dataset ds = generate_synthetic(dspec);
    TrainSpec tspec;
    tspec.epochs = 1;
    tspec.seed = 6;
    for (ArchId arch : {ArchId::cnn_a, ArchId::cnn_b, ArchId::mlp}) {
        const Classifier model = train(arch, ds, tspec);
        const std::string path = dir.file(arch_name(arch) + ".grfw");
        save_classifier(model, path);
        const Classifier loaded = load_classifier(path);
        CHECK(loaded.arch == model.arch);
        CHECK(loaded.num_classes == model.num_classes);
        CHECK(loaded.in_h == model.in_h);
        CHECK(params_bitwise_equal(model, loaded));
    }
}

TEST_CASE("truncated weight file is rejected without a partial model") {
    TempDir dir("trunc");
    const Classifier model = make_classifier(ArchId::mlp, 3, 3, 16, 16, 77);
    const std::string path = dir.file("m.grfw");
    save_classifier(model, path);

    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    in.close();
    const std::string cut = dir.file("cut.grfw");
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_classifier(cut), format_error);
}

TEST_CASE("arch tag mismatch names both architectures") {
    TempDir dir("archtag");
    const Classifier model = make_classifier(ArchId::cnn_b, 4, 3, 16, 16, 3);
    const std::string path = dir.file("b.grfw");
    save_classifier(model, path);
    try {
        load_classifier(path, ArchId::cnn_a);
        FAIL("expected format_error");
    } catch (const format_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("cnn_a") != std::string::npos);
        CHECK(msg.find("cnn_b") != std::string::npos);
    }
}

TEST_CASE("bad magic is rejected") {
    TempDir dir("magic");
    const std::string path = dir.file("bogus.grfw");
    std::ofstream out(path, std::ios::binary);
    out << "NOPE this is not a weight file";
    out.close();
    CHECK_THROWS_AS(load_classifier(path), format_error);
}
