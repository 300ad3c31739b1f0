#pragma once

// Error taxonomy for the sensing-rate library. Every failure mode a caller
// can recover from gets its own type; generic precondition breaches use
// std::invalid_argument.

#include <stdexcept>
#include <string>

namespace ser {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SER_DEFINE_ERROR(Name)                     \
    class Name : public Error {                    \
    public:                                        \
        using Error::Error;                        \
    }

SER_DEFINE_ERROR(DimensionMismatch);
SER_DEFINE_ERROR(NotHermitian);
SER_DEFINE_ERROR(IndefiniteInput);
SER_DEFINE_ERROR(NegativeBudget);
SER_DEFINE_ERROR(AllModesDisabled);
SER_DEFINE_ERROR(DistortionOutOfRange);
SER_DEFINE_ERROR(NumericalFailure);
SER_DEFINE_ERROR(SingularPrior);
SER_DEFINE_ERROR(InsufficientRows);
SER_DEFINE_ERROR(ZeroChannel);
SER_DEFINE_ERROR(NotPositiveDefinite);
SER_DEFINE_ERROR(JacobianFailure);
SER_DEFINE_ERROR(ZeroEnergy);
SER_DEFINE_ERROR(NonPositiveInput);
SER_DEFINE_ERROR(DelayOutOfRange);
SER_DEFINE_ERROR(SingularGram);
SER_DEFINE_ERROR(ConfigError);
SER_DEFINE_ERROR(InvariantViolation);

#undef SER_DEFINE_ERROR

}  // namespace ser
