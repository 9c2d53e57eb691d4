#pragma once

#include "sl3/exact.hpp"
#include "sl3/lattice.hpp"
#include "sl3/lie.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace sl3 {

struct OrbitSample {
    double t = 0;
    double eta = 0;
    Gauge gauge = Gauge::Log;
    bool certified = false;
    double searched_radius = 0;
    IntegerMat3 witness;
};

struct OrbitSeries {
    UnipotentUpper base_point;
    FlowParams flow;
    std::vector<OrbitSample> samples;
};

// eta(a_t p) for each t of the grid; certification loss is reported per sample.
OrbitSeries orbit_eta_series(const ExactUnipotent& p, const FlowParams& flow, const std::vector<double>& t_grid,
                             double search_radius = 4.0, int64_t node_budget = 50'000'000);

// Least-squares slope of -log eta against t over samples with t in [t_min, t_max].
double estimate_type(const OrbitSeries& series, double t_min, double t_max);

struct GammaWitness {
    double t = 0;
    double v_minus_norm = 0, v_zero_norm = 0, v_plus_norm = 0;
};

std::pair<bool, GammaWitness> gamma_condition_check(const Mat3& v, double t, double gamma,
                                                    const ConstantsProfile& constants);

struct WeylType {
    int index = 0;
    std::pair<int, int> pivot_pair;  // 1-based (row of u, column of w)
};

class NotNuConjugate : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

WeylType weyl_type(const ExactMat3& v);
int weyl_index_of_pivots(int row, int col);  // 0 for the impossible diagonal pairs

struct MembershipQuery {
    ExactMat3 p;  // representative of the point being tested
    ExactMat3 q;  // representative of the rational point
    double t = 0;
    int family = 3;
    double gamma = 0;
    std::optional<IntegerMat3> witness;
};

struct MembershipReport {
    bool member = false;
    bool near_boundary = false;
    double d_q = 0;
    double band_lo = 0, band_hi = 0;
    std::array<double, 3> displacement{};  // log coordinates of the N+ displacement
    double line_factor = 0;                // d_G(y, e) for families 4 and 5
};

MembershipReport family_membership_report(const MembershipQuery& query, const FlowParams& flow,
                                          const ConstantsProfile& constants);
bool family_membership(const MembershipQuery& query, const FlowParams& flow, const ConstantsProfile& constants);

double nonemptiness_threshold(const FlowParams& flow);

// Polynomials over Q in formal variables t0, t1, ... that are taken to be
// algebraically independent reals; an element is rational iff it is constant.
class FormalReal {
public:
    FormalReal() = default;
    FormalReal(const ExactScalar& c);  // NOLINT(google-explicit-constructor)
    static FormalReal variable(int index);

    bool is_rational() const;
    ExactScalar constant() const;

    friend FormalReal operator+(const FormalReal& a, const FormalReal& b);
    friend FormalReal operator-(const FormalReal& a, const FormalReal& b);
    friend FormalReal operator*(const FormalReal& a, const FormalReal& b);

private:
    void prune();
    std::map<std::vector<int>, ExactScalar> terms_;
};

struct FormalUnipotent {
    FormalReal x12, x23, x13;
};

struct LineStructure {
    bool alpha_line = false;  // p in N_{alpha0} N+(Q) Γ
    bool beta_line = false;   // p in N_{beta0} N+(Q) Γ
};

LineStructure rational_line_structure(const FormalUnipotent& p);

}  // namespace sl3
