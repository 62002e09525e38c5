#pragma once

#include <cmath>
#include <cstring>
#include <filesystem>
#include <unistd.h>
#include <string>
#include <vector>

#include "grf/rng.hpp"
#include "grf/tensor.hpp"

namespace testutil {

inline grf::Tensor random_tensor(grf::Shape shape, grf::Rng& rng, float lo = -1.0f,
                                 float hi = 1.0f) {
    grf::Tensor t(shape);
    for (float& v : t.data) {
        v = lo + (hi - lo) * rng.next_float();
    }
    return t;
}

inline double max_abs_diff(const grf::Tensor& a, const grf::Tensor& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::fabs(static_cast<double>(a.data[i]) - b.data[i]));
    }
    return m;
}

inline bool bitwise_equal(const grf::Tensor& a, const grf::Tensor& b) {
    return a.shape == b.shape &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0;
}

// float equality per element (treats -0 and +0 as equal, NaN as unequal)
inline bool value_equal(const grf::Tensor& a, const grf::Tensor& b) {
    if (a.shape != b.shape) {
        return false;
    }
    for (size_t i = 0; i < a.data.size(); ++i) {
        if (a.data[i] != b.data[i]) {
            return false;
        }
    }
    return true;
}

// Self-cleaning temp directory for file round-trip tests.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("grf_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace testutil
