#pragma once

#include <stdexcept>
#include <string>

namespace aqua {

/// Root of every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters or an illegal request against the model.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A value outside the mathematical domain of a formula (e.g. a zero rate).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Programming bug, e.g. recording an undeclared metrics key.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// A packet exhausted its retransmission budget.
class SessionFailed : public Error {
 public:
  using Error::Error;
};

class SpawnRejected : public Error {
 public:
  using Error::Error;
};

class MigrationRejected : public Error {
 public:
  using Error::Error;
};

class ItemTooLarge : public Error {
 public:
  using Error::Error;
};

class OffloadFailed : public Error {
 public:
  using Error::Error;
};

class TooLargeForOracle : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

/// An allocation plan that does not fit the live capacities; nothing was
/// changed.
class PlanRejected : public Error {
 public:
  using Error::Error;
};

/// A config or report file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqua
