#pragma once

#include "sl3/exact.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace sl3 {

// Diagonal flow a_t = exp(t diag(lambda1, lambda2, lambda3)).
struct FlowParams {
    double lambda1 = 1.0, lambda2 = 0.0, lambda3 = -1.0;

    FlowParams() = default;
    FlowParams(double l1, double l2, double l3);

    double alpha0() const { return lambda1 - lambda2; }
    double beta0() const { return lambda2 - lambda3; }
    double highest() const { return lambda1 - lambda3; }
    double nu() const { return lambda3 - lambda1; }
    std::array<double, 3> lambdas() const { return {lambda1, lambda2, lambda3}; }
};

enum class Root { PosAlpha, PosBeta, PosHighest, NegAlpha, NegBeta, NegHighest };

double root_value(Root root, const FlowParams& flow);
inline double root_eval(Root root, const FlowParams& flow, double t) { return t * root_value(root, flow); }

struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity();
    static Mat3 diag(double a, double b, double c);
    static Mat3 from_exact(const ExactMat3& a);

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    double det() const;
    Mat3 inverse() const;
    double frobenius() const;
    double max_abs() const;

    friend Mat3 operator*(const Mat3& a, const Mat3& b);
    friend Mat3 operator+(const Mat3& a, const Mat3& b);
    friend Mat3 operator-(const Mat3& a, const Mat3& b);
    friend Mat3 operator*(double s, const Mat3& a);
};

Mat3 flow_matrix(const FlowParams& flow, double t);

// Coordinates in the basis e_{+a}, e_{+b}, e_{+(a+b)}, e_{-a}, e_{-b}, e_{-(a+b)} (the
// elementary matrices E12, E23, E13, E21, E32, E31) and e1 = diag(1,-1,0),
// e2 = diag(0,1,-1).
template <class T>
struct RootCoordsT {
    T c_pa0{}, c_pb0{}, c_pab{}, c_ma0{}, c_mb0{}, c_mab{}, c_e1{}, c_e2{};

    T& coeff(Root r) {
        switch (r) {
            case Root::PosAlpha: return c_pa0;
            case Root::PosBeta: return c_pb0;
            case Root::PosHighest: return c_pab;
            case Root::NegAlpha: return c_ma0;
            case Root::NegBeta: return c_mb0;
            default: return c_mab;
        }
    }
    const T& coeff(Root r) const { return const_cast<RootCoordsT*>(this)->coeff(r); }
};

using RootCoords = RootCoordsT<double>;
using ExactRootCoords = RootCoordsT<ExactScalar>;

inline constexpr std::array<Root, 6> kRoots{Root::PosAlpha,  Root::PosBeta, Root::PosHighest,
                                            Root::NegAlpha,  Root::NegBeta, Root::NegHighest};

RootCoords coords_of(const Mat3& traceless);
ExactRootCoords coords_of(const ExactMat3& traceless);
Mat3 matrix_of(const RootCoords& c);
ExactMat3 matrix_of(const ExactRootCoords& c);
RootCoords to_double(const ExactRootCoords& c);

double norm(const RootCoords& c);  // max-abs over the 8 coefficients
double minus_block_norm(const RootCoords& c);
double zero_block_norm(const RootCoords& c);
double plus_block_norm(const RootCoords& c);

// Nilpotent logarithm / exponential (the series stop at the square term).
ExactRootCoords log_unipotent(const ExactMat3& u);
RootCoords log_unipotent(const Mat3& u, double tol = 1e-12);
ExactMat3 exp_nilpotent(const ExactRootCoords& c);
Mat3 exp_nilpotent(const RootCoords& c);

// Principal logarithm of a matrix close to the identity, by the power series
// of log(I + N); requires ||N||_F < 1.
Mat3 log_near_identity(const Mat3& v);

RootCoords adjoint_flow(const RootCoords& c, const FlowParams& flow, double t);

template <class T>
struct UnipotentUpperT {
    T x12{}, x23{}, x13{};

    friend UnipotentUpperT operator*(const UnipotentUpperT& a, const UnipotentUpperT& b) {
        return {a.x12 + b.x12, a.x23 + b.x23, a.x13 + b.x13 + a.x12 * b.x23};
    }
    UnipotentUpperT inverse() const { return {-x12, -x23, x12 * x23 - x13}; }
    // log coordinates (a, b, a+b components); exp inverts.
    std::array<T, 3> log() const { return {x12, x23, x13 - x12 * x23 / 2}; }
    static UnipotentUpperT exp(const std::array<T, 3>& y) { return {y[0], y[1], y[2] + y[0] * y[1] / 2}; }
    friend bool operator==(const UnipotentUpperT& a, const UnipotentUpperT& b) {
        return a.x12 == b.x12 && a.x23 == b.x23 && a.x13 == b.x13;
    }
};

using UnipotentUpper = UnipotentUpperT<double>;
using ExactUnipotent = UnipotentUpperT<ExactScalar>;

ExactMat3 to_matrix(const ExactUnipotent& n);
Mat3 to_matrix(const UnipotentUpper& n);
ExactUnipotent unipotent_of(const ExactMat3& n);  // throws unless upper unipotent
ExactUnipotent exact_of(const UnipotentUpper& n);  // binary doubles are exact rationals
UnipotentUpper to_double(const ExactUnipotent& n);

template <class T>
struct Reduced {
    UnipotentUpperT<T> rep;
    IntegerMat3 witness;
};

Reduced<ExactScalar> reduce_mod_gamma(const ExactUnipotent& n);
Reduced<double> reduce_mod_gamma(const UnipotentUpper& n);

struct KerNuSplit {
    std::array<double, 3> perp;
    double c;
};

KerNuSplit project_ker_nu(const std::array<double, 3>& y, const FlowParams& flow);

struct Box3 {
    double r1 = 0, r2 = 0, r3 = 0;
    bool contains(const std::array<double, 3>& log_coords) const {
        return std::abs(log_coords[0]) <= r1 && std::abs(log_coords[1]) <= r2 &&
               std::abs(log_coords[2]) <= r3;
    }
    double volume() const { return 8 * r1 * r2 * r3; }
};

struct ConstantsProfile {
    double kappa = 1.0;
    double kappa_prime = 10.0;
    double kappa_double_prime = 10.0;
    double C = 4.0;
    double r0 = 0.5;
    double epsilon0 = 0.25;

    void validate() const;
};

}  // namespace sl3
