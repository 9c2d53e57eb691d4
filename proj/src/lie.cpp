#include "sl3/lie.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace sl3 {

FlowParams::FlowParams(double l1, double l2, double l3) : lambda1(l1), lambda2(l2), lambda3(l3) {
    if (!(l1 > l2 && l2 > l3)) throw PreconditionError("flow exponents must satisfy l1 > l2 > l3");
    if (std::abs(l1 + l2 + l3) > 1e-12) throw PreconditionError("flow exponents must sum to zero");
}

double root_value(Root root, const FlowParams& f) {
    switch (root) {
        case Root::PosAlpha: return f.alpha0();
        case Root::PosBeta: return f.beta0();
        case Root::PosHighest: return f.highest();
        case Root::NegAlpha: return -f.alpha0();
        case Root::NegBeta: return -f.beta0();
        case Root::NegHighest: return -f.highest();
    }
    return 0;
}

Mat3 Mat3::identity() { return diag(1, 1, 1); }

Mat3 Mat3::diag(double a, double b, double c) {
    Mat3 r;
    r.m[0][0] = a;
    r.m[1][1] = b;
    r.m[2][2] = c;
    return r;
}

Mat3 Mat3::from_exact(const ExactMat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j].get_d();
    return r;
}

double Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 Mat3::inverse() const {
    double dt = det();
    if (dt == 0) throw PreconditionError("singular matrix");
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
            int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            r.m[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / dt;
        }
    return r;
}

double Mat3::frobenius() const {
    double s = 0;
    for (auto& row : m)
        for (double x : row) s += x * x;
    return std::sqrt(s);
}

double Mat3::max_abs() const {
    double s = 0;
    for (auto& row : m)
        for (double x : row) s = std::max(s, std::abs(x));
    return s;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
    return r;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

Mat3 operator*(double s, const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

Mat3 flow_matrix(const FlowParams& f, double t) {
    return Mat3::diag(std::exp(f.lambda1 * t), std::exp(f.lambda2 * t), std::exp(f.lambda3 * t));
}

namespace {

template <class C, class M>
C coords_impl(const M& x) {
    C c;
    c.c_pa0 = x.m[0][1];
    c.c_pb0 = x.m[1][2];
    c.c_pab = x.m[0][2];
    c.c_ma0 = x.m[1][0];
    c.c_mb0 = x.m[2][1];
    c.c_mab = x.m[2][0];
    c.c_e1 = x.m[0][0];
    c.c_e2 = -x.m[2][2];
    return c;
}

template <class M, class C>
M matrix_impl(const C& c) {
    M x;
    x.m[0][1] = c.c_pa0;
    x.m[1][2] = c.c_pb0;
    x.m[0][2] = c.c_pab;
    x.m[1][0] = c.c_ma0;
    x.m[2][1] = c.c_mb0;
    x.m[2][0] = c.c_mab;
    x.m[0][0] = c.c_e1;
    x.m[1][1] = c.c_e2 - c.c_e1;
    x.m[2][2] = -c.c_e2;
    return x;
}

}  // namespace

RootCoords coords_of(const Mat3& x) { return coords_impl<RootCoords>(x); }
ExactRootCoords coords_of(const ExactMat3& x) { return coords_impl<ExactRootCoords>(x); }
Mat3 matrix_of(const RootCoords& c) { return matrix_impl<Mat3>(c); }
ExactMat3 matrix_of(const ExactRootCoords& c) { return matrix_impl<ExactMat3>(c); }

RootCoords to_double(const ExactRootCoords& c) {
    return {c.c_pa0.get_d(), c.c_pb0.get_d(), c.c_pab.get_d(), c.c_ma0.get_d(),
            c.c_mb0.get_d(), c.c_mab.get_d(), c.c_e1.get_d(),  c.c_e2.get_d()};
}

double minus_block_norm(const RootCoords& c) {
    return std::max({std::abs(c.c_ma0), std::abs(c.c_mb0), std::abs(c.c_mab)});
}
double zero_block_norm(const RootCoords& c) { return std::max(std::abs(c.c_e1), std::abs(c.c_e2)); }
double plus_block_norm(const RootCoords& c) {
    return std::max({std::abs(c.c_pa0), std::abs(c.c_pb0), std::abs(c.c_pab)});
}
double norm(const RootCoords& c) {
    return std::max({minus_block_norm(c), zero_block_norm(c), plus_block_norm(c)});
}

ExactRootCoords log_unipotent(const ExactMat3& u) {
    ExactMat3 n = u - ExactMat3::identity();
    ExactMat3 n2 = n * n;
    if (!(n2 * n == ExactMat3{})) throw PreconditionError("log_unipotent: matrix is not unipotent");
    ExactMat3 x = n - ExactScalar(1, 2) * n2;
    return coords_of(x);
}

RootCoords log_unipotent(const Mat3& u, double tol) {
    Mat3 n = u - Mat3::identity();
    Mat3 n2 = n * n;
    double scale = std::max(1.0, n.max_abs());
    if ((n2 * n).max_abs() > tol * scale * scale * scale)
        throw PreconditionError("log_unipotent: matrix is not unipotent");
    return coords_of(n - 0.5 * n2);
}

ExactMat3 exp_nilpotent(const ExactRootCoords& c) {
    ExactMat3 x = matrix_of(c);
    return ExactMat3::identity() + x + ExactScalar(1, 2) * (x * x);
}

Mat3 exp_nilpotent(const RootCoords& c) {
    Mat3 x = matrix_of(c);
    return Mat3::identity() + x + 0.5 * (x * x);
}

Mat3 log_near_identity(const Mat3& v) {
    Mat3 n = v - Mat3::identity();
    if (n.frobenius() >= 1) throw PreconditionError("log_near_identity: ||v - I|| >= 1");
    Mat3 acc, pw = n;
    for (int k = 1; k <= 400; ++k) {
        Mat3 term = (((k % 2) ? 1.0 : -1.0) / k) * pw;
        acc = acc + term;
        if (term.max_abs() <= 1e-18 * std::max(1e-300, acc.max_abs())) break;
        pw = pw * n;
    }
    return acc;
}

RootCoords adjoint_flow(const RootCoords& c, const FlowParams& flow, double t) {
    RootCoords r = c;
    for (Root root : kRoots) {
        double s = std::exp(root_eval(root, flow, t));
        if (!std::isfinite(s) || s == 0) throw std::overflow_error("adjoint_flow: scale factor out of range");
        r.coeff(root) = c.coeff(root) * s;
    }
    return r;
}

ExactMat3 to_matrix(const ExactUnipotent& n) {
    ExactMat3 r = ExactMat3::identity();
    r.m[0][1] = n.x12;
    r.m[1][2] = n.x23;
    r.m[0][2] = n.x13;
    return r;
}

Mat3 to_matrix(const UnipotentUpper& n) {
    Mat3 r = Mat3::identity();
    r.m[0][1] = n.x12;
    r.m[1][2] = n.x23;
    r.m[0][2] = n.x13;
    return r;
}

ExactUnipotent unipotent_of(const ExactMat3& n) {
    if (!n.is_upper_unipotent()) throw PreconditionError("matrix is not upper unipotent");
    return {n.m[0][1], n.m[1][2], n.m[0][2]};
}

ExactUnipotent exact_of(const UnipotentUpper& n) {
    if (!std::isfinite(n.x12) || !std::isfinite(n.x23) || !std::isfinite(n.x13))
        throw PreconditionError("non-finite coordinate");
    return {ExactScalar(n.x12), ExactScalar(n.x23), ExactScalar(n.x13)};
}

UnipotentUpper to_double(const ExactUnipotent& n) { return {n.x12.get_d(), n.x23.get_d(), n.x13.get_d()}; }

namespace {

ExactInt floor_of(const ExactScalar& x) {
    ExactInt r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

ExactInt floor_of(double x) {
    if (!std::isfinite(x)) throw PreconditionError("non-finite coordinate");
    return ExactInt(std::floor(x));
}

template <class T>
T from_int(const ExactInt& k) {
    if constexpr (std::is_same_v<T, ExactScalar>)
        return ExactScalar(k);
    else
        return k.get_d();
}

// right multiplication by integer unipotents, in the order x23, x12, x13
template <class T>
Reduced<T> reduce_impl(const UnipotentUpperT<T>& n) {
    using U = UnipotentUpperT<T>;
    ExactInt m23 = -floor_of(n.x23);
    U a = n * U{T(0), from_int<T>(m23), T(0)};
    ExactInt m12 = -floor_of(a.x12);
    U b = a * U{from_int<T>(m12), T(0), T(0)};
    ExactInt m13 = -floor_of(b.x13);
    U c = b * U{T(0), T(0), from_int<T>(m13)};
    // witness = (0,m23,0)·(m12,0,0)·(0,0,m13)
    IntegerMat3 w = IntegerMat3::identity();
    w.m[0][1] = m12;
    w.m[1][2] = m23;
    w.m[0][2] = m13;
    return {c, w};
}

}  // namespace

Reduced<ExactScalar> reduce_mod_gamma(const ExactUnipotent& n) { return reduce_impl(n); }
Reduced<double> reduce_mod_gamma(const UnipotentUpper& n) {
    Reduced<double> r = reduce_impl(n);
    // float rounding can land exactly on 1.0
    if (r.rep.x12 >= 1.0) r.rep.x12 = std::nextafter(1.0, 0.0);
    if (r.rep.x23 >= 1.0) r.rep.x23 = std::nextafter(1.0, 0.0);
    if (r.rep.x13 >= 1.0) r.rep.x13 = std::nextafter(1.0, 0.0);
    return r;
}

KerNuSplit project_ker_nu(const std::array<double, 3>& y, const FlowParams& flow) {
    if (std::abs(y[0] + y[1] + y[2]) > 1e-9 * (1 + std::abs(y[0]) + std::abs(y[2])))
        throw PreconditionError("project_ker_nu expects a traceless diagonal element");
    double c = (y[2] - y[0]) / flow.nu();
    auto l = flow.lambdas();
    return {{y[0] - c * l[0], y[1] - c * l[1], y[2] - c * l[2]}, c};
}

void ConstantsProfile::validate() const {
    if (!(kappa >= 1 && kappa_prime >= 1 && kappa_double_prime >= 1 && C >= 1))
        throw PreconditionError("kappa, kappa', kappa'', C must be >= 1");
    if (!(r0 > 0 && r0 <= 1 && epsilon0 > 0 && epsilon0 <= 1))
        throw PreconditionError("r0 and epsilon0 must lie in (0, 1]");
}

}  // namespace sl3
