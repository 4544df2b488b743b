#pragma once

#include <stdexcept>
#include <string>

namespace evblur {

/// Input outside an operation's domain (timestamps out of span, geometry mismatch, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Malformed or unreadable file.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Threshold calibration could not produce a finite objective.
class CalibrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace evblur
