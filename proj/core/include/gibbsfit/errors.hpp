#pragma once

#include <stdexcept>
#include <string>

namespace gibbsfit {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Pruning removed every block: the forbidden words leave no bi-infinite sequence.
class EmptyShift : public Error {
public:
  using Error::Error;
};

/// The pruned transition matrix is not primitive.
class NotMixing : public Error {
public:
  using Error::Error;
};

/// A requested enumeration would exceed the configured candidate cap.
class ResourceLimit : public Error {
public:
  using Error::Error;
};

/// Power iteration failed to reach the requested tolerance.
class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, double residual)
      : Error(what), final_residual(residual) {}
  double final_residual;
};

/// Observation type does not match the loss kind.
class KindMismatch : public Error {
public:
  using Error::Error;
};

/// Paired sequences have different lengths.
class LengthMismatch : public Error {
public:
  using Error::Error;
};

/// A parameter lies outside its admissible domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Two tables or grids that must line up do not.
class ShapeMismatch : public Error {
public:
  using Error::Error;
};

/// No generator registered under the requested name.
class UnknownGenerator : public Error {
public:
  using Error::Error;
};

/// Every model on the grid assigns probability zero to the observed cylinder.
class InadmissibleObservation : public Error {
public:
  using Error::Error;
};

/// A loss evaluation produced NaN.
class NonFinite : public Error {
public:
  using Error::Error;
};

/// A scenario configuration is invalid; the message names the offending field.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace gibbsfit
