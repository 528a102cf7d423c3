#pragma once

#include <stdexcept>
#include <string>

namespace qpt {

// An input failed a documented numerical precondition (non-Hermitian matrix,
// inconsistent counts, unphysical Stokes vector, ...).  Carries the offending
// residual when one is meaningful.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// The probe set (or the beta tensor built from it) is not tomographically
// complete: the linear system mapping chi to the measured coefficients is
// singular or too ill-conditioned to invert.
class tomography_error : public std::runtime_error {
public:
    tomography_error(const std::string& what, double condition_number)
        : std::runtime_error(what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

// File could not be read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qpt
