#pragma once

#include <stdexcept>
#include <string>

namespace emx {

/// Physics-domain failure: a model operation was asked to evaluate outside
/// its physical domain (pull-in, touching plates, division by a vanishing
/// linewidth, ...). Carries the operation name for diagnostics and for the
/// CLI exit-code contract.
class domain_error : public std::runtime_error {
public:
    domain_error(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), op_(std::move(operation)) {}

    const std::string& operation() const noexcept { return op_; }

private:
    std::string op_;
};

/// Configuration / schema failure. Carries the JSON field path.
class config_error : public std::runtime_error {
public:
    config_error(std::string field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), path_(std::move(field_path)) {}

    const std::string& field_path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Filesystem / serialization failure.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emx
