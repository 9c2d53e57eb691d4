#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sl3/exact.hpp"
#include "support.hpp"

#include <numeric>

using namespace sl3;

namespace {

IntegerVec3 iv(long a, long b, long c) { return {ExactInt(a), ExactInt(b), ExactInt(c)}; }

ExactScalar frac(long n, long d) {
    ExactScalar r(n, d);
    r.canonicalize();
    return r;
}

bool same(const IntegerVec3& x, const IntegerVec3& y) { return x[0] == y[0] && x[1] == y[1] && x[2] == y[2]; }

// Every property the adapted basis must have, checked directly from the flag.
void check_adapted(const RationalFlag& flag, const AdaptedBasis& b) {
    IntegerMat3 m = IntegerMat3::from_columns(b.v1, b.v2, b.v3);
    CHECK(m.det() == 1);
    CHECK(dot(b.v1, flag.normal) == 0);
    CHECK(dot(b.v2, flag.normal) == 0);
    CHECK(content(b.v1) == 1);
    IntegerVec3 c = cross(flag.line, b.v1);
    CHECK(same(c, iv(0, 0, 0)));
    // {v1, v2} spans P2 ∩ Z^3 iff v1 x v2 is the primitive normal up to sign
    IntegerVec3 n = cross(b.v1, b.v2), pn = primitive_part(flag.normal);
    IntegerVec3 neg{-pn[0], -pn[1], -pn[2]};
    CHECK((same(n, pn) || same(n, neg)));
}

}  // namespace

TEST_CASE("scalar parsing and printing") {
    CHECK(parse_scalar("3") == 3);
    CHECK(parse_scalar("-2/5") == ExactScalar(-2, 5));
    CHECK(parse_scalar("0.75") == ExactScalar(3, 4));
    CHECK(parse_scalar("4/6") == ExactScalar(2, 3));
    CHECK(to_string(ExactScalar(0)) == "0");
    CHECK(to_string(ExactScalar(-6, 4)) == "-3/2");
    CHECK_THROWS_AS(parse_scalar("abc"), PreconditionError);
    CHECK_THROWS_AS(parse_scalar("1/0"), PreconditionError);
}

TEST_CASE("matrix algebra is exact") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        ExactMat3 g = testing::random_diagonal_det1(rng) * testing::random_lower_unipotent(rng) *
                      weyl(1 + k % 6) * testing::random_upper_unipotent(rng);
        CHECK(g.det() == 1);
        CHECK(g * g.inverse() == ExactMat3::identity());
        CHECK(g.transpose().transpose() == g);
    }
    CHECK(ExactMat3::elementary(2, 0, 3)(2, 0) == 3);
    CHECK(IntegerMat3::identity().det() == 1);
    ExactMat3 half = ExactMat3::diag(ExactScalar(1, 2), 2, 1);
    CHECK_THROWS_AS(to_integer(half), PreconditionError);
}

TEST_CASE("primitive part") {
    CHECK(same(primitive_part(iv(2, 4, 6)), iv(1, 2, 3)));
    CHECK(same(primitive_part(iv(0, 0, 5)), iv(0, 0, 1)));
    CHECK(same(primitive_part(iv(-3, 6, -9)), iv(-1, 2, -3)));
    CHECK(content(primitive_part(iv(12, -18, 30))) == 1);
    CHECK_THROWS_AS(primitive_part(iv(0, 0, 0)), PreconditionError);
}

TEST_CASE("flag adapted basis") {
    SUBCASE("standard flag gives the identity") {
        RationalFlag f{iv(1, 0, 0), iv(0, 0, 1), 1};
        AdaptedBasis b = flag_adapted_basis(f);
        CHECK(same(b.v1, iv(1, 0, 0)));
        CHECK(same(b.v2, iv(0, 1, 0)));
        CHECK(same(b.v3, iv(0, 0, 1)));
    }
    SUBCASE("line (-1,-1,2) in the plane 2x+z=0") {
        RationalFlag f{iv(-1, -1, 2), iv(2, 0, 1), 1};
        AdaptedBasis b = flag_adapted_basis(f);
        CHECK(same(b.v1, iv(-1, -1, 2)));
        check_adapted(f, b);
        // brute force: an adapted completion with entries bounded by 3 exists
        bool found = false;
        for (int x = -3; x <= 3 && !found; ++x)
            for (int y = -3; y <= 3 && !found; ++y)
                for (int z = -3; z <= 3 && !found; ++z)
                    for (int u = -3; u <= 3 && !found; ++u)
                        for (int v = -3; v <= 3 && !found; ++v)
                            for (int w = -3; w <= 3 && !found; ++w) {
                                AdaptedBasis c{iv(-1, -1, 2), iv(x, y, z), iv(u, v, w)};
                                if (2 * x + z != 0) continue;
                                if (IntegerMat3::from_columns(c.v1, c.v2, c.v3).det() == 1) found = true;
                            }
        CHECK(found);
    }
    SUBCASE("coordinate flag e3 in x=0") {
        RationalFlag f{iv(0, 0, 1), iv(1, 0, 0), 1};
        AdaptedBasis b = flag_adapted_basis(f);
        CHECK(same(b.v1, iv(0, 0, 1)));
        check_adapted(f, b);
    }
    SUBCASE("random flags") {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> e(-9, 9);
        for (int k = 0; k < 200; ++k) {
            IntegerVec3 line = iv(e(rng), e(rng), e(rng));
            IntegerVec3 other = iv(e(rng), e(rng), e(rng));
            IntegerVec3 normal = cross(line, other);
            if (content(line) == 0 || content(normal) == 0) continue;
            RationalFlag f{line, normal, 1};
            AdaptedBasis b = flag_adapted_basis(f);
            check_adapted(f, b);
            IntegerVec3 pl = primitive_part(line);
            IntegerVec3 ng{-pl[0], -pl[1], -pl[2]};
            CHECK((same(b.v1, pl) || same(b.v1, ng)));
        }
    }
    SUBCASE("degenerate flag rejected") {
        CHECK_THROWS_AS(flag_adapted_basis({iv(1, 0, 0), iv(1, 0, 0), 1}), PreconditionError);
        CHECK_THROWS_AS(flag_adapted_basis({iv(0, 0, 0), iv(1, 0, 0), 1}), PreconditionError);
    }
}

TEST_CASE("lower triangularization") {
    auto point = [](long a, long b, long p1, long p2, long q) {
        ExactMat3 g = ExactMat3::identity();
        g(0, 1) = ExactScalar(a, b);
        g(0, 2) = ExactScalar(p1, q) + ExactScalar(a, b) * ExactScalar(p2, q);
        g(1, 2) = ExactScalar(p2, q);
        for (auto& row : g.m)
            for (auto& x : row) x.canonicalize();
        return g;
    };
    auto check = [](const ExactMat3& g, const LowerTriangularization& r) {
        CHECK(r.gamma.det() == 1);
        CHECK(r.lower == g * r.gamma.to_exact());
        CHECK(r.lower.is_lower_triangular());
        CHECK(r.lower.det() == 1);
    };
    SUBCASE("identity") {
        auto r = lower_triangularize(ExactMat3::identity());
        check(ExactMat3::identity(), r);
        CHECK(r.lower == ExactMat3::identity());
        CHECK(r.gamma == IntegerMat3::identity());
    }
    SUBCASE("(0,1,1,1,2)") {
        ExactMat3 g = point(0, 1, 1, 1, 2);
        auto r = lower_triangularize(g);
        check(g, r);
        CHECK(r.lower(0, 0) == ExactScalar(1, 2));
        CHECK(r.lower(1, 1) == 1);
        CHECK(r.lower(2, 2) == 2);
    }
    SUBCASE("(1,2,1,0,2)") {
        ExactMat3 g = point(1, 2, 1, 0, 2);
        auto r = lower_triangularize(g);
        check(g, r);
        CHECK(r.lower(0, 0) == ExactScalar(1, 2));
        CHECK(r.lower(1, 1) == 1);
        CHECK(r.lower(2, 2) == 2);
    }
    SUBCASE("random rational unipotents: diagonal (d/(bq), b/d, q)") {
        for (long b = 1; b <= 5; ++b)
            for (long a = 0; a < b; ++a) {
                if (std::gcd(a, b) != 1) continue;
                for (long q = 1; q <= 6; ++q)
                    for (long p1 = 0; p1 < q; ++p1)
                        for (long p2 = 0; p2 < q; ++p2) {
                            if (std::gcd(std::gcd(p1, p2), q) != 1) continue;
                            ExactMat3 g = point(a, b, p1, p2, q);
                            auto r = lower_triangularize(g);
                            check(g, r);
                            long d = std::gcd(q, b * p1 + a * p2);
                            CHECK(r.lower(0, 0) == frac(d, b * q));
                            CHECK(r.lower(1, 1) == frac(b, d));
                            CHECK(r.lower(2, 2) == q);
                        }
            }
    }
    SUBCASE("non-unipotent rejected") {
        CHECK_THROWS_AS(lower_triangularize(ExactMat3::diag(2, 1, ExactScalar(1, 2))), PreconditionError);
    }
}

TEST_CASE("Bruhat decomposition") {
    SUBCASE("upper unipotent is cell 1") {
        ExactMat3 g = ExactMat3::identity();
        g(0, 1) = 3;
        g(1, 2) = ExactScalar(-1, 2);
        BruhatCell c = bruhat_decompose(g);
        CHECK(c.cell_index == 1);
        CHECK(c.d == ExactMat3::identity());
        CHECK(c.n_minus == ExactMat3::identity());
        CHECK(c.n_plus == g);
    }
    for (int i = 1; i <= 6; ++i) {
        CAPTURE(i);
        BruhatCell c = bruhat_decompose(weyl(i));
        CHECK(c.cell_index == i);
        CHECK(c.d == ExactMat3::identity());
        CHECK(c.n_minus == ExactMat3::identity());
        CHECK(c.n_plus == ExactMat3::identity());
    }
    SUBCASE("random products land in their cell") {
        std::mt19937_64 rng(11);
        for (int k = 0; k < 300; ++k) {
            int i = 1 + k % 6;
            ExactMat3 g = testing::random_diagonal_det1(rng) * testing::random_lower_unipotent(rng) * weyl(i) *
                          testing::random_upper_unipotent(rng);
            BruhatCell c = bruhat_decompose(g);
            CHECK(c.cell_index == i);
            CHECK(c.recompose() == g);
            CHECK(c.d.is_diagonal());
            CHECK(c.d.det() == 1);
            CHECK(c.n_minus.is_lower_unipotent());
            CHECK(c.n_plus.is_upper_unipotent());
        }
    }
    SUBCASE("det must be 1") { CHECK_THROWS_AS(bruhat_decompose(ExactMat3::diag(2, 1, 1)), PreconditionError); }
}
