#pragma once

#include <stdexcept>
#include <string>

namespace seqinfo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class InvalidDesign : public Error {
   public:
    using Error::Error;
};

/// Truncation interval carries (numerically) no probability mass.
class DegenerateTruncation : public Error {
   public:
    using Error::Error;
};

/// Conditioning on a decision whose probability is negligible.
class DegenerateDecision : public Error {
   public:
    using Error::Error;
};

class ZeroInformation : public Error {
   public:
    using Error::Error;
};

class InvalidOutcome : public Error {
   public:
    using Error::Error;
};

class MismatchedInputs : public Error {
   public:
    using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before meeting tolerance.
class NonConvergence : public Error {
   public:
    NonConvergence(const std::string& what, double estimate, double error)
        : Error(what), estimate_(estimate), error_(error) {}

    [[nodiscard]] double estimate() const noexcept { return estimate_; }
    [[nodiscard]] double error() const noexcept { return error_; }

   private:
    double estimate_;
    double error_;
};

}  // namespace seqinfo
