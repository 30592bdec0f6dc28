// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace touchauth {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a type invariant or operation precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two traces that must be compared sample-by-sample differ in length or rate.
class LengthMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A trace with zero variance was passed to a correlation metric.
class ZeroVariance : public Error {
public:
    using Error::Error;
};

/// No point on a ROC curve satisfies the requested false-acceptance bound.
class NoFeasibleThreshold : public Error {
public:
    using Error::Error;
};

/// Malformed scenario/config document.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace touchauth
