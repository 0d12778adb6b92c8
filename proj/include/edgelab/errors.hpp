#ifndef EDGELAB_ERRORS_HPP
#define EDGELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace edgelab {

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EllipticityViolation : SpecError {
  using SpecError::SpecError;
};
struct DegenerateMarginal : SpecError {
  using SpecError::SpecError;
};
struct LagOutOfRange : SpecError {
  using SpecError::SpecError;
};
struct ImpossiblePin : SpecError {
  using SpecError::SpecError;
};
struct SupportOverflow : SpecError {
  using SpecError::SpecError;
};
struct NodeBudgetExceeded : SpecError {
  using SpecError::SpecError;
};
struct LogOfVanishingJet : SpecError {
  using SpecError::SpecError;
};
struct DegenerateVariance : SpecError {
  using SpecError::SpecError;
};
struct ResonantDegenerate : SpecError {
  using SpecError::SpecError;
};
struct OrderMismatch : SpecError {
  using SpecError::SpecError;
};
struct TailBudgetExceeded : SpecError {
  using SpecError::SpecError;
};
struct DeltaTooLarge : SpecError {
  using SpecError::SpecError;
};
struct ParameterOutOfRange : SpecError {
  using SpecError::SpecError;
};
struct StepOutOfRange : SpecError {
  using SpecError::SpecError;
};
struct NoContraction : SpecError {
  using SpecError::SpecError;
};

}  // namespace edgelab

#endif  // EDGELAB_ERRORS_HPP
