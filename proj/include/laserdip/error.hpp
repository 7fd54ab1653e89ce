#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace laserdip {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical or dimensionless parameters (non-positive mass, sigma >= w, ...).
class parameter_error : public error {
public:
    using error::error;
};

/// The potential does not have the expected double-well shape.
class shape_error : public error {
public:
    using error::error;
};

/// Eigensolver failure; carries the index of the offending level.
class numeric_error : public error {
public:
    numeric_error(const std::string& what, std::size_t level)
        : error(what), level_(level) {}

    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

/// Doublet cannot be selected (ambiguous parity labels).
class selection_error : public error {
public:
    using error::error;
};

/// Argument outside the mathematical domain of an operation (|z| > 1, gamma <= 1).
class domain_error : public error {
public:
    using error::error;
};

/// Evaluation at |z| = 1 where the junction equations diverge.
class singularity_error : public error {
public:
    using error::error;
};

/// Junction parameters with j == 0.
class degenerate_error : public error {
public:
    using error::error;
};

/// Trajectory too short to decide between Josephson and self-trapped motion.
class inconclusive_error : public error {
public:
    using error::error;
};

/// Output file could not be written.
class io_error : public error {
public:
    using error::error;
};

/// Malformed run configuration or command line.
class usage_error : public error {
public:
    using error::error;
};

} // namespace laserdip
