#pragma once

#include "sl3/exact.hpp"
#include "sl3/lie.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

namespace sl3 {

// Rational point n12(a/b) * [[1,0,p1/q],[0,1,p2/q],[0,0,1]] of N+Γ/Γ.
struct RationalPointCanon {
    ExactInt a, b, p1, p2, q;
    ExactInt d, d_p;
    std::array<ExactScalar, 3> a_p;

    static RationalPointCanon make(const ExactInt& a, const ExactInt& b, const ExactInt& p1,
                                   const ExactInt& p2, const ExactInt& q);
    ExactUnipotent expand() const;
    friend bool operator==(const RationalPointCanon& x, const RationalPointCanon& y) {
        return x.a == y.a && x.b == y.b && x.p1 == y.p1 && x.p2 == y.p2 && x.q == y.q;
    }
};

RationalPointCanon canonicalize(const ExactUnipotent& g);
ExactInt denominator_formula(const RationalPointCanon& pt);

// Least s > 0 with g^{-1}(I + s E31) g integral, for any rational g.
ExactInt stabilizer_denominator(const ExactMat3& g);
ExactInt denominator_oracle(const ExactUnipotent& g);

std::array<ExactScalar, 3> polar_component(const RationalPointCanon& pt);

// ker-nu coordinate s of log a_p for a_p = (d/(bq), b/d, q).
double kernu_coord(int64_t b, int64_t q, int64_t d, const FlowParams& flow);
double kernu_coord(const RationalPointCanon& pt, const FlowParams& flow);

// Machine-integer view of a canonical point, used by the counting loops.
struct BandPoint {
    int64_t a, b, p1, p2, q, d;
    int64_t d_p() const { return b * q / d * q; }
    // coordinates of the representative reduced into [0,1)^3 (matrix entries)
    std::array<double, 3> coords() const;
};

struct CountBox {
    std::array<double, 3> lo{0, 0, 0};
    std::array<double, 3> hi{1, 1, 1};

    bool contains(const std::array<double, 3>& x) const {
        for (int i = 0; i < 3; ++i)
            if (!(x[i] >= lo[i] && x[i] < hi[i])) return false;
        return true;
    }
    double volume() const;
    bool unit_in_x23_x13() const { return lo[1] <= 0 && hi[1] >= 1 && lo[2] <= 0 && hi[2] >= 1; }
};

struct CountSpec {
    CountBox box;
    double l = 1;
    std::optional<double> K_halfwidth;
    FlowParams flow;

    void validate() const;
};

struct BandRun {
    int64_t emitted = 0;
    bool truncated = false;
};

// Visits the canonical points of the band in ascending (b, q, a, p1, p2) order.
BandRun for_each_band_point(const CountSpec& spec, const std::function<void(const BandPoint&)>& visit,
                            int64_t budget = INT64_MAX);

struct BandStream {
    std::vector<RationalPointCanon> points;
    bool truncated = false;
};

BandStream enumerate_band(const CountSpec& spec, int64_t budget = INT64_MAX);
int64_t count_band(const CountSpec& spec);

// Number of (p1, p2) mod q with gcd(p1,p2,q) = 1 and gcd(q, b p1 + a p2) = d,
// for any coprime (a, b).
int64_t residue_count(int64_t q, int64_t d);
int64_t euler_phi(int64_t n);

enum class Family { E1, E2, E3 };
int64_t count_family(Family family, int64_t l);

RationalPointCanon to_canon(const BandPoint& p);
void write_points_csv(std::ostream& os, const std::vector<RationalPointCanon>& pts, const FlowParams& flow);

}  // namespace sl3
