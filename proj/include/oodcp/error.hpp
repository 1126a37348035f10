#pragma once

#include <stdexcept>
#include <string>

namespace oodcp {

// Base class for every failure this library reports deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two sequences that must align element-wise do not.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// A probability vector has a bad sum or a negative entry.
class NotNormalized : public Error {
 public:
  using Error::Error;
};

// A container that must be non-empty is empty.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// A score is NaN or infinite where a finite value is required.
class NonFiniteScore : public Error {
 public:
  using Error::Error;
};

// No calibration scores were supplied.
class EmptyCalibration : public Error {
 public:
  using Error::Error;
};

// A set-size threshold below zero makes no set.
class NegativeThreshold : public Error {
 public:
  using Error::Error;
};

// The regression design matrix does not have full column rank.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// No epsilon in (0, 1] keeps the corrected quantile level at or below 1.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// A specific epsilon violates the feasibility requirements.
class InfeasibleEpsilon : public Infeasible {
 public:
  using Infeasible::Infeasible;
};

// A divergence family name is not one of the registered ones.
class UnknownFamily : public Error {
 public:
  using Error::Error;
};

// A custom divergence generator failed its registration checks.
class InvalidFamily : public Error {
 public:
  using Error::Error;
};

// A score file or config file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// An experiment configuration violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oodcp
