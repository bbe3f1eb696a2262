#pragma once

#include <stdexcept>
#include <string>

namespace polrhet {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file did not match its declared or expected schema (missing column,
// unparseable cell, bad header).  The message names the offending column
// and, where possible, the line number.
struct SchemaError : Error {
  using Error::Error;
};

// Input data violated a contract (duplicate ids, unknown foreign key,
// out-of-range label, ...).
struct ValidationError : Error {
  using Error::Error;
};

// A configuration value or specification is unusable as written.
struct ConfigError : Error {
  using Error::Error;
};

// An estimator received degenerate inputs (zero variance, single cluster,
// non-convergence, exhausted degrees of freedom).
struct EstimationError : Error {
  using Error::Error;
};

// A closed-form computation was asked to evaluate outside its domain.
struct DomainError : Error {
  using Error::Error;
};

}  // namespace polrhet
