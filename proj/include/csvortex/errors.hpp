#ifndef CSVORTEX_ERRORS_HPP
#define CSVORTEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csvortex {

/// A vertex field was used with a graph of a different size.
class AlignmentError : public std::invalid_argument {
public:
    AlignmentError(std::size_t field_size, std::size_t vertex_count)
        : std::invalid_argument("vertex field of length " + std::to_string(field_size) +
                                " is not aligned with a graph on " +
                                std::to_string(vertex_count) + " vertices") {}
};

/// Right-hand side violates a solvability condition (e.g. nonzero mean for the
/// singular Poisson system). Carries the offending integral.
class CompatibilityError : public std::runtime_error {
public:
    CompatibilityError(const std::string& what, double integral)
        : std::runtime_error(what), integral_(integral) {}
    double integral() const { return integral_; }

private:
    double integral_;
};

/// An iterative method exhausted its budget. Carries the last residual.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

} // namespace csvortex

#endif
