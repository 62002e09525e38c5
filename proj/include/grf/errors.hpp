#pragma once

#include <stdexcept>
#include <string>

namespace grf {

/// Malformed or truncated file contents (bad magic, bad shapes, short reads).
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

/// Adversarial batch does not match the dataset/config it claims to come from.
class provenance_error : public std::runtime_error {
public:
    explicit provenance_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace grf
