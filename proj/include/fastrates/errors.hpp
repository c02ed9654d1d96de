#pragma once

#include <stdexcept>
#include <string>

namespace fastrates {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expectation mixes +inf and unbounded-below mass.
struct UndefinedExpectation : Error { using Error::Error; };
// No predictor in the model has finite risk under P.
struct AllInfiniteRisk : Error { using Error::Error; };
struct AllInfiniteEmpiricalRisk : Error { using Error::Error; };
// An exponential moment diverges where a finite value is required.
struct InfiniteMoment : Error { using Error::Error; };
// A v- or u-function fails its own monotonicity/positivity constraints.
struct ShapeViolation : Error { using Error::Error; };
struct GammaShapeViolation : Error { using Error::Error; };
struct SubstitutionOutsideDecisionSet : Error { using Error::Error; };
struct EmbeddingMissing : Error { using Error::Error; };
// Moment problem instance violates the feasibility threshold.
struct InfeasibleInstance : Error { using Error::Error; };
struct NoFeasibleAtomTriple : Error { using Error::Error; };
// Internal bug guard: a constructed dual certificate failed its grid check.
struct CertificateInvalid : Error { using Error::Error; };
struct ConditionalNotInFamily : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct UnsupportedKind : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace fastrates
