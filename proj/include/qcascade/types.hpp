#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qcascade {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Base class for all library errors.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class DimensionOdd : public Error {
   public:
    using Error::Error;
};

class DimensionMismatch : public Error {
   public:
    using Error::Error;
};

class ShapeMismatch : public Error {
   public:
    using Error::Error;
};

class NotSkewSymmetric : public Error {
   public:
    using Error::Error;
};

class SingularInput : public Error {
   public:
    using Error::Error;
};

/// Leading 2k-column skew Gram matrix judged rank deficient; carries the
/// 1-based prefix index.
class RankDeficientPrefix : public Error {
   public:
    RankDeficientPrefix(Index prefix, const std::string& what)
        : Error(what), prefix(prefix) {}
    Index prefix;
};

class DefectiveMatrix : public Error {
   public:
    using Error::Error;
};

class NotAdmissible : public Error {
   public:
    using Error::Error;
};

class TriangularizationResidual : public Error {
   public:
    TriangularizationResidual(double residual, const std::string& what)
        : Error(what), residual(residual) {}
    double residual;
};

class NotSymplectic : public Error {
   public:
    using Error::Error;
};

class NonUnitaryScattering : public Error {
   public:
    using Error::Error;
};

class ResolventSingular : public Error {
   public:
    using Error::Error;
};

class ChannelMismatch : public Error {
   public:
    using Error::Error;
};

class VerificationFailed : public Error {
   public:
    VerificationFailed(double deviation, const std::string& what)
        : Error(what), deviation(deviation) {}
    double deviation;
};

class ParseError : public Error {
   public:
    using Error::Error;
};

}  // namespace qcascade
