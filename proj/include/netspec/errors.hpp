#ifndef NETSPEC_ERRORS_HPP
#define NETSPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace netspec {

/// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver hit its iteration cap without meeting its tolerance.
struct NonConvergence : Error {
  using Error::Error;
};

/// A root was requested on an interval whose endpoints coincide; the
/// problem must be deflated before the solver can run.
struct InvalidBracket : Error {
  using Error::Error;
};

/// A matrix that must be symmetric (or Hermitian) is not.
struct NotHermitian : Error {
  using Error::Error;
};

/// An operation that needs every node to have at least one neighbor was
/// handed a graph with a degree-zero node.
struct IsolatedNode : Error {
  using Error::Error;
};

/// The graph is not connected but the operation requires it.
struct Disconnected : Error {
  using Error::Error;
};

/// Requested generator parameters cannot produce a valid graph.
struct InfeasibleParameters : Error {
  using Error::Error;
};

/// A random graph generator gave up after its retry budget.
struct ConnectivityRetryExhausted : Error {
  using Error::Error;
};

/// Diffusion step size violates the stability bound.
struct StepSizeTooLarge : Error {
  using Error::Error;
};

/// Polynomial fitting matrix is numerically singular.
struct IllConditionedFit : Error {
  using Error::Error;
};

/// Subspace product matrix C in the rotational-invariance solve is
/// singular or too ill-conditioned to invert.
struct SingularC : Error {
  using Error::Error;
};

/// A recovered phase does not map back into the admissible angle range.
struct AngleOutOfRange : Error {
  using Error::Error;
};

/// Config file could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

/// Config parsed but the values are inconsistent or out of range.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace netspec

#endif
