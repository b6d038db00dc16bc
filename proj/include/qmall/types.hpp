#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qmall {

using cplx = std::complex<double>;
using Index = Eigen::Index;

// Coefficients over the real orthonormal modes e_1..e_m.
using HVec = Eigen::VectorXcd;
using FockVec = Eigen::VectorXcd;
using FockOp = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<cplx>;

inline constexpr cplx I_unit{0.0, 1.0};

struct DirectionPair {
    HVec k1;
    HVec k2;

    DirectionPair conj() const { return {k1.conjugate(), k2.conjugate()}; }
    bool is_real(double tol = 0.0) const;
    DirectionPair scaled(cplx s) const { return {s * k1, s * k2}; }
    Index modes() const { return k1.size(); }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionLimitError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularDirectionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NotAdaptedError : public Error {
public:
    using Error::Error;
};

}  // namespace qmall
