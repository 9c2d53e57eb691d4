#include "sl3/exact.hpp"

#include <algorithm>
#include <ostream>

namespace sl3 {

ExactMat3 ExactMat3::identity() { return diag(1, 1, 1); }

ExactMat3 ExactMat3::diag(const ExactScalar& a, const ExactScalar& b, const ExactScalar& c) {
    ExactMat3 r;
    r.m[0][0] = a;
    r.m[1][1] = b;
    r.m[2][2] = c;
    return r;
}

ExactMat3 ExactMat3::elementary(int i, int j, const ExactScalar& s) {
    ExactMat3 r = identity();
    r.m[i][j] += s;
    return r;
}

ExactScalar ExactMat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

ExactMat3 ExactMat3::inverse() const {
    ExactScalar dt = det();
    if (dt == 0) throw PreconditionError("singular matrix");
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
            int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            r.m[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / dt;
        }
    return r;
}

ExactMat3 ExactMat3::transpose() const {
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

bool ExactMat3::is_lower_triangular() const {
    return m[0][1] == 0 && m[0][2] == 0 && m[1][2] == 0;
}

bool ExactMat3::is_upper_unipotent() const {
    return m[1][0] == 0 && m[2][0] == 0 && m[2][1] == 0 && m[0][0] == 1 && m[1][1] == 1 &&
           m[2][2] == 1;
}

bool ExactMat3::is_lower_unipotent() const {
    return is_lower_triangular() && m[0][0] == 1 && m[1][1] == 1 && m[2][2] == 1;
}

bool ExactMat3::is_diagonal() const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j && m[i][j] != 0) return false;
    return true;
}

bool ExactMat3::is_integral() const {
    for (auto& row : m)
        for (auto& x : row)
            if (x.get_den() != 1) return false;
    return true;
}

ExactMat3 operator*(const ExactMat3& a, const ExactMat3& b) {
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ExactScalar s = 0;
            for (int k = 0; k < 3; ++k)
                if (a.m[i][k] != 0 && b.m[k][j] != 0) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

ExactMat3 operator+(const ExactMat3& a, const ExactMat3& b) {
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

ExactMat3 operator-(const ExactMat3& a, const ExactMat3& b) {
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

ExactMat3 operator*(const ExactScalar& s, const ExactMat3& a) {
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

bool operator==(const ExactMat3& a, const ExactMat3& b) { return a.m == b.m; }

std::ostream& operator<<(std::ostream& os, const ExactMat3& a) {
    os << "[";
    for (int i = 0; i < 3; ++i) {
        os << (i ? ";" : "");
        for (int j = 0; j < 3; ++j) os << (j ? "," : "") << to_string(a.m[i][j]);
    }
    return os << "]";
}

IntegerMat3 IntegerMat3::identity() {
    IntegerMat3 r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = 1;
    return r;
}

IntegerMat3 IntegerMat3::from_columns(const IntegerVec3& c0, const IntegerVec3& c1,
                                      const IntegerVec3& c2) {
    IntegerMat3 r;
    for (int i = 0; i < 3; ++i) {
        r.m[i][0] = c0[i];
        r.m[i][1] = c1[i];
        r.m[i][2] = c2[i];
    }
    return r;
}

ExactInt IntegerMat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

ExactMat3 IntegerMat3::to_exact() const {
    ExactMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = ExactScalar(m[i][j]);
    return r;
}

IntegerMat3 operator*(const IntegerMat3& a, const IntegerMat3& b) {
    IntegerMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ExactInt s = 0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

bool operator==(const IntegerMat3& a, const IntegerMat3& b) { return a.m == b.m; }

IntegerMat3 to_integer(const ExactMat3& a) {
    IntegerMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (a.m[i][j].get_den() != 1) throw PreconditionError("matrix entry is not an integer");
            r.m[i][j] = a.m[i][j].get_num();
        }
    return r;
}

ExactInt dot(const IntegerVec3& a, const IntegerVec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

IntegerVec3 cross(const IntegerVec3& a, const IntegerVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

ExactInt content(const IntegerVec3& v) {
    ExactInt g = 0;
    for (auto& x : v) g = gcd(g, x);
    return g;
}

IntegerVec3 primitive_part(const IntegerVec3& v) {
    ExactInt g = content(v);
    if (g == 0) throw PreconditionError("primitive_part of the zero vector");
    return {ExactInt(v[0] / g), ExactInt(v[1] / g), ExactInt(v[2] / g)};
}

ExactScalar parse_scalar(const std::string& s) {
    if (s.empty()) throw PreconditionError("empty number");
    auto dot_pos = s.find('.');
    if (dot_pos != std::string::npos) {
        if (s.find_first_of("eE") != std::string::npos)
            throw PreconditionError("exponent notation is not exact: " + s);
        std::string digits = s.substr(0, dot_pos) + s.substr(dot_pos + 1);
        size_t frac = s.size() - dot_pos - 1;
        ExactInt num;
        if (num.set_str(digits, 10) != 0) throw PreconditionError("bad number: " + s);
        ExactInt den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        ExactScalar r(num, den);
        r.canonicalize();
        return r;
    }
    ExactScalar r;
    if (r.set_str(s, 10) != 0) throw PreconditionError("bad number: " + s);
    if (r.get_den() == 0) throw PreconditionError("zero denominator: " + s);
    r.canonicalize();
    return r;
}

std::string to_string(const ExactScalar& q) {
    ExactScalar c(q);
    c.canonicalize();
    return c.get_str();
}

namespace {

ExactInt floor_div(const ExactInt& a, const ExactInt& b) {
    ExactInt r;
    mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

ExactInt floor_q(const ExactScalar& x) {
    ExactInt r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

IntegerVec3 axpy(const ExactInt& k, const IntegerVec3& x, const IntegerVec3& y) {
    return {y[0] + k * x[0], y[1] + k * x[1], y[2] + k * x[2]};
}

IntegerVec3 neg(const IntegerVec3& v) { return {ExactInt(-v[0]), ExactInt(-v[1]), ExactInt(-v[2])}; }

int leading_sign(const IntegerVec3& v) {
    for (auto& x : v)
        if (x != 0) return sgn(x);
    return 0;
}

// Column-reduce the row vector n to (±1, 0, 0); returns U with n·U = (±1,0,0).
IntegerMat3 unimodular_kernel_completion(const IntegerVec3& n) {
    IntegerMat3 u = IntegerMat3::identity();
    IntegerVec3 row = n;
    auto col_op = [&](int dst, int src, const ExactInt& k) {  // col dst -= k col src
        row[dst] -= k * row[src];
        for (int i = 0; i < 3; ++i) u.m[i][dst] -= k * u.m[i][src];
    };
    auto col_swap = [&](int a, int b) {
        std::swap(row[a], row[b]);
        for (int i = 0; i < 3; ++i) std::swap(u.m[i][a], u.m[i][b]);
    };
    for (;;) {
        int piv = -1;
        for (int j = 0; j < 3; ++j)
            if (row[j] != 0 && (piv < 0 || abs(row[j]) < abs(row[piv]))) piv = j;
        if (piv < 0) throw PreconditionError("zero normal");
        bool done = true;
        for (int j = 0; j < 3; ++j) {
            if (j == piv || row[j] == 0) continue;
            col_op(j, piv, ExactInt(row[j] / row[piv]));
            if (row[j] != 0) done = false;
        }
        if (done) {
            if (piv != 0) col_swap(0, piv);
            return u;
        }
    }
}

}  // namespace

AdaptedBasis flag_adapted_basis(const RationalFlag& flag) {
    if (content(flag.line) == 0 || content(flag.normal) == 0)
        throw PreconditionError("flag vectors must be nonzero");
    if (dot(flag.line, flag.normal) != 0) throw PreconditionError("degenerate flag: line not in plane");
    IntegerVec3 v1 = primitive_part(flag.line);
    IntegerVec3 n = primitive_part(flag.normal);
    if (flag.orientation < 0) n = neg(n);

    IntegerMat3 u = unimodular_kernel_completion(n);
    IntegerVec3 u0 = u.column(0), u1 = u.column(1), u2 = u.column(2);

    // coordinates of v1 in (u0,u1,u2); the u0 coordinate vanishes
    ExactMat3 uinv = u.to_exact().inverse();
    ExactInt c1 = ExactScalar(uinv.m[1][0] * v1[0] + uinv.m[1][1] * v1[1] + uinv.m[1][2] * v1[2]).get_num();
    ExactInt c2 = ExactScalar(uinv.m[2][0] * v1[0] + uinv.m[2][1] * v1[1] + uinv.m[2][2] * v1[2]).get_num();
    ExactInt g, x, y;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), c1.get_mpz_t(), c2.get_mpz_t());
    IntegerVec3 v2 = axpy(x, u2, axpy(ExactInt(-y), u1, IntegerVec3{0, 0, 0}));

    int p = 0;
    while (v1[p] == 0) ++p;
    ExactInt mod = abs(v1[p]);
    auto shift = [&](const IntegerVec3& w) {
        ExactInt k = floor_div(w[p], mod) * sgn(v1[p]);
        return axpy(ExactInt(-k), v1, w);
    };
    IntegerVec3 a = shift(v2), b = shift(neg(v2));
    bool pa = leading_sign(a) > 0, pb = leading_sign(b) > 0;
    if (pa && pb)
        v2 = std::min(a, b);
    else
        v2 = pa ? a : b;

    IntegerVec3 v3 = u0;
    if (IntegerMat3::from_columns(v1, v2, v3).det() < 0) v3 = neg(v3);

    // shift v3 by the plane lattice so its in-plane coordinates lie in [0,1)
    ExactScalar g11 = ExactScalar(dot(v1, v1)), g12 = ExactScalar(dot(v1, v2)),
                g22 = ExactScalar(dot(v2, v2));
    ExactScalar r1 = ExactScalar(dot(v1, v3)), r2 = ExactScalar(dot(v2, v3));
    ExactScalar det = g11 * g22 - g12 * g12;
    ExactScalar xs = (r1 * g22 - r2 * g12) / det;
    ExactScalar ys = (g11 * r2 - g12 * r1) / det;
    v3 = axpy(ExactInt(-floor_q(xs)), v1, v3);
    v3 = axpy(ExactInt(-floor_q(ys)), v2, v3);
    return {v1, v2, v3};
}

LowerTriangularization lower_triangularize(const ExactMat3& g) {
    if (!g.is_upper_unipotent()) throw PreconditionError("lower_triangularize expects an upper unipotent matrix");
    ExactMat3 ginv = g.inverse();
    // line: g^{-1} e3, plane: g^{-1} span(e2, e3) = ker(first row of g)
    auto integerize = [](const std::array<ExactScalar, 3>& v) {
        ExactInt l = 1;
        for (auto& x : v) l = lcm(l, ExactInt(x.get_den()));
        IntegerVec3 r;
        for (int i = 0; i < 3; ++i) r[i] = ExactScalar(v[i] * l).get_num();
        return r;
    };
    RationalFlag flag;
    flag.line = integerize({ginv.m[0][2], ginv.m[1][2], ginv.m[2][2]});
    flag.normal = integerize({g.m[0][0], g.m[0][1], g.m[0][2]});
    AdaptedBasis b = flag_adapted_basis(flag);
    IntegerMat3 gamma = IntegerMat3::from_columns(neg(b.v3), b.v2, b.v1);
    ExactMat3 l = g * gamma.to_exact();
    if (l.m[0][0] < 0) {
        for (int i = 0; i < 3; ++i) {
            gamma.m[i][0] = -gamma.m[i][0];
            gamma.m[i][1] = -gamma.m[i][1];
        }
        l = g * gamma.to_exact();
    }
    return {gamma, l};
}

const ExactMat3& weyl(int index) {
    static const std::array<ExactMat3, 6> w = [] {
        auto mk = [](std::array<int, 9> e) {
            ExactMat3 r;
            for (int i = 0; i < 9; ++i) r.m[i / 3][i % 3] = e[i];
            return r;
        };
        return std::array<ExactMat3, 6>{
            mk({1, 0, 0, 0, 1, 0, 0, 0, 1}),  mk({1, 0, 0, 0, 0, -1, 0, 1, 0}),
            mk({0, -1, 0, 1, 0, 0, 0, 0, 1}), mk({0, 0, 1, 1, 0, 0, 0, 1, 0}),
            mk({0, 1, 0, 0, 0, 1, 1, 0, 0}),  mk({0, 0, 1, 0, -1, 0, 1, 0, 0})};
    }();
    if (index < 1 || index > 6) throw PreconditionError("Weyl index must be in 1..6");
    return w[index - 1];
}

std::array<bool, 3> bruhat_free_entries(int cell_index) {
    switch (cell_index) {
        case 1: return {true, true, true};
        case 2: return {true, false, true};
        case 3: return {false, true, true};
        case 4: return {true, false, false};
        case 5: return {false, true, false};
        case 6: return {false, false, false};
    }
    throw PreconditionError("cell index must be in 1..6");
}

ExactMat3 BruhatCell::recompose() const { return d * n_minus * weyl(cell_index) * n_plus; }

BruhatCell bruhat_decompose(const ExactMat3& g) {
    if (g.det() != 1) throw PreconditionError("bruhat_decompose expects det = 1");
    ExactMat3 r = g;
    ExactMat3 l = ExactMat3::identity();
    std::array<int, 3> piv{};
    for (int k = 0; k < 3; ++k) {
        for (int m = 0; m < k; ++m) {
            ExactScalar c = r.m[k][piv[m]] / r.m[m][piv[m]];
            if (c == 0) continue;
            l.m[k][m] = c;
            for (int j = 0; j < 3; ++j) r.m[k][j] -= c * r.m[m][j];
        }
        int p = 0;
        while (r.m[k][p] == 0) ++p;
        piv[k] = p;
    }
    // pivot column sequence (1-based) of w1..w6
    static const std::array<std::array<int, 3>, 6> patterns{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}}};
    int idx = 0;
    while (patterns[idx] != piv) ++idx;
    BruhatCell out;
    out.cell_index = idx + 1;
    const ExactMat3& w = weyl(out.cell_index);
    ExactMat3 dp;
    for (int k = 0; k < 3; ++k) dp.m[k][k] = r.m[k][piv[k]] / w.m[k][piv[k]];
    ExactMat3 dinv = dp.inverse();
    out.d = dp;
    out.n_minus = dinv * l * dp;
    out.n_plus = w.transpose() * (dinv * r);
    return out;
}

}  // namespace sl3
