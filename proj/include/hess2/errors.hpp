#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hess2 {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Caller broke a documented precondition (e.g. input not in the required cone).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid grid/run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Expression evaluation hit an undefined operation; `subexpr` is the printed
// offending subexpression, `context` optionally locates the evaluation point.
class EvalError : public DomainError {
public:
    EvalError(std::string reason, std::string subexpr, const std::string& context = {})
        : DomainError(reason + " in '" + subexpr + "'" + (context.empty() ? "" : " " + context)),
          reason_(std::move(reason)), subexpr_(std::move(subexpr)) {}
    const std::string& reason() const noexcept { return reason_; }
    const std::string& subexpr() const noexcept { return subexpr_; }

private:
    std::string reason_;
    std::string subexpr_;
};

class EllipticityLost : public std::runtime_error {
public:
    EllipticityLost(std::array<int, 3> node, double margin)
        : std::runtime_error("ellipticity lost at node (" + std::to_string(node[0]) + "," +
                             std::to_string(node[1]) + "," + std::to_string(node[2]) +
                             "), margin " + std::to_string(margin)),
          node_(node), margin_(margin) {}
    std::array<int, 3> node() const noexcept { return node_; }
    double margin() const noexcept { return margin_; }

private:
    std::array<int, 3> node_;
    double margin_;
};

class LinearSolveDiverged : public std::runtime_error {
public:
    LinearSolveDiverged(int iterations, double residual)
        : std::runtime_error("linear solve did not converge after " + std::to_string(iterations) +
                             " iterations (residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class EpsilonExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hess2
