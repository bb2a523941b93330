#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace pim {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sample coordinates, one column per point (ambient dimension x count).
using PointMatrix = Eigen::MatrixXd;

/// Values aligned with the points of a cloud.
using DiscreteField = Eigen::VectorXd;

using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// Malformed input file or config value.
class ParseError : public Error
{
public:
    using Error::Error;
};

class SingularMatrix : public Error
{
public:
    using Error::Error;
};

class NoConvergence : public Error
{
public:
    using Error::Error;
};

/// Query point is farther than the kernel support from every sample.
class OutOfSupport : public Error
{
public:
    using Error::Error;
};

} // namespace pim
