#pragma once

#include <gmpxx.h>

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace sl3 {

// mpq_class keeps numerator/denominator reduced with a positive denominator,
// zero is 0/1.
using ExactScalar = mpq_class;
using ExactInt = mpz_class;

struct ExactMat3 {
    std::array<std::array<ExactScalar, 3>, 3> m{};

    static ExactMat3 identity();
    static ExactMat3 diag(const ExactScalar& a, const ExactScalar& b, const ExactScalar& c);
    static ExactMat3 elementary(int i, int j, const ExactScalar& s = 1);  // I + s*E_ij, 0-based

    ExactScalar& operator()(int i, int j) { return m[i][j]; }
    const ExactScalar& operator()(int i, int j) const { return m[i][j]; }

    ExactScalar det() const;
    ExactScalar trace() const { return m[0][0] + m[1][1] + m[2][2]; }
    ExactMat3 inverse() const;
    ExactMat3 transpose() const;

    bool is_lower_triangular() const;
    bool is_upper_unipotent() const;
    bool is_lower_unipotent() const;
    bool is_diagonal() const;
    bool is_integral() const;

    friend ExactMat3 operator*(const ExactMat3& a, const ExactMat3& b);
    friend ExactMat3 operator+(const ExactMat3& a, const ExactMat3& b);
    friend ExactMat3 operator-(const ExactMat3& a, const ExactMat3& b);
    friend ExactMat3 operator*(const ExactScalar& s, const ExactMat3& a);
    friend bool operator==(const ExactMat3& a, const ExactMat3& b);
    friend bool operator!=(const ExactMat3& a, const ExactMat3& b) { return !(a == b); }
};

std::ostream& operator<<(std::ostream& os, const ExactMat3& a);

using IntegerVec3 = std::array<ExactInt, 3>;

struct IntegerMat3 {
    std::array<std::array<ExactInt, 3>, 3> m{};

    static IntegerMat3 identity();
    static IntegerMat3 from_columns(const IntegerVec3& c0, const IntegerVec3& c1, const IntegerVec3& c2);

    ExactInt& operator()(int i, int j) { return m[i][j]; }
    const ExactInt& operator()(int i, int j) const { return m[i][j]; }

    ExactInt det() const;
    IntegerVec3 column(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
    ExactMat3 to_exact() const;

    friend IntegerMat3 operator*(const IntegerMat3& a, const IntegerMat3& b);
    friend bool operator==(const IntegerMat3& a, const IntegerMat3& b);
};

IntegerMat3 to_integer(const ExactMat3& a);  // throws if an entry is not integral

ExactInt dot(const IntegerVec3& a, const IntegerVec3& b);
IntegerVec3 cross(const IntegerVec3& a, const IntegerVec3& b);
ExactInt content(const IntegerVec3& v);
IntegerVec3 primitive_part(const IntegerVec3& v);

ExactScalar parse_scalar(const std::string& s);  // "3", "-2/5", "0.75"
std::string to_string(const ExactScalar& q);      // "num/den" or "num"

// A flag line ⊂ plane in Q^3, stored by a primitive direction and a primitive
// normal. orientation is the sign attached to the normal; the adapted basis
// below is independent of it.
struct RationalFlag {
    IntegerVec3 line;
    IntegerVec3 normal;
    int orientation = 1;
};

struct AdaptedBasis {
    IntegerVec3 v1, v2, v3;
};

AdaptedBasis flag_adapted_basis(const RationalFlag& flag);

struct LowerTriangularization {
    IntegerMat3 gamma;
    ExactMat3 lower;
};

LowerTriangularization lower_triangularize(const ExactMat3& g);

// Weyl representatives w1..w6 (index 1..6).
const ExactMat3& weyl(int index);

struct BruhatCell {
    int cell_index = 1;
    ExactMat3 d;
    ExactMat3 n_minus;
    ExactMat3 n_plus;
    ExactMat3 recompose() const;
};

BruhatCell bruhat_decompose(const ExactMat3& g);

// Upper unipotent subgroup attached to cell i: entries of n_plus allowed to be
// nonzero. Index order (x12, x23, x13).
std::array<bool, 3> bruhat_free_entries(int cell_index);

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace sl3
