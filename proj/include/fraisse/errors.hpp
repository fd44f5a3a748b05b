#pragma once

#include <stdexcept>
#include <string>

namespace fraisse {

/// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a request is well-formed but deliberately refused (size caps).
class RefusalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A certificate or witness failed to re-verify.
class VerificationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace fraisse
