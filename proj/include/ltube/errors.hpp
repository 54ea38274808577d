//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/errors.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <stdexcept>
#include <string>

namespace ltube
{
//---------------------------------------------------------------------------//
//! Base class for all library errors
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A ratio estimator whose denominator has nonpositive sample mean
class DegenerateDenominator : public Error
{
  public:
    DegenerateDenominator() : Error("ratio estimator: denominator mean <= 0")
    {
    }
};

//! Too few rays fell in a conditioning window
class InsufficientConditioningMass : public Error
{
  public:
    using Error::Error;
};

//! Fixed-point iteration stopped before reaching the tolerance
class NonConvergence : public Error
{
  public:
    using Error::Error;
};

//! The far-field cutoff error exceeds the requested tolerance
class TruncationDominates : public Error
{
  public:
    using Error::Error;
};

//! A renewal estimate does not cover the requested range
class WindowTooSmall : public Error
{
  public:
    using Error::Error;
};

//! Invalid experiment configuration (the message names the field)
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//! No run manifests where a report was requested
class MissingArtifacts : public Error
{
  public:
    using Error::Error;
};

//! Throw std::invalid_argument unless a precondition holds
inline void expect(bool condition, char const* what)
{
    if (!condition)
    {
        throw std::invalid_argument(what);
    }
}

//---------------------------------------------------------------------------//
}  // namespace ltube
