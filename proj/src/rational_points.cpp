#include "sl3/rational_points.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numeric>

namespace sl3 {

namespace {

std::mutex g_table_mutex;
std::shared_ptr<const std::vector<int32_t>> g_phi;

// Euler phi table covering [0, n]; the returned table is immutable
std::shared_ptr<const std::vector<int32_t>> phi_table(int64_t n) {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    if (g_phi && int64_t(g_phi->size()) > n) return g_phi;
    int64_t m = std::max<int64_t>(n + 1, g_phi ? 2 * int64_t(g_phi->size()) : 1024);
    auto t = std::make_shared<std::vector<int32_t>>(m);
    std::iota(t->begin(), t->end(), 0);
    auto& v = *t;
    for (int64_t p = 2; p < m; ++p)
        if (v[p] == p)
            for (int64_t k = p; k < m; k += p) v[k] -= v[k] / int32_t(p);
    g_phi = t;
    return g_phi;
}

std::vector<int64_t> divisors(int64_t q) {
    std::vector<int64_t> lo, hi;
    for (int64_t k = 1; k * k <= q; ++k)
        if (q % k == 0) {
            lo.push_back(k);
            if (k * k != q) hi.push_back(q / k);
        }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

ExactInt floor_q(const ExactScalar& x) {
    ExactInt r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

ExactScalar frac(const ExactScalar& x) { return x - ExactScalar(floor_q(x)); }

// decides d_p in [l/2, l]
bool in_band(int64_t dp, double l) { return 2.0 * double(dp) >= l && double(dp) <= l; }

}  // namespace

int64_t euler_phi(int64_t n) {
    if (n < 1) throw PreconditionError("euler_phi expects n >= 1");
    return (*phi_table(n))[n];
}

int64_t residue_count(int64_t q, int64_t d) {
    if (q % d != 0) return 0;
    auto phi = phi_table(q);
    return int64_t((*phi)[q / d]) * (q / d) * (*phi)[d];
}

RationalPointCanon RationalPointCanon::make(const ExactInt& a, const ExactInt& b, const ExactInt& p1,
                                            const ExactInt& p2, const ExactInt& q) {
    if (b < 1 || q < 1) throw PreconditionError("b and q must be positive");
    if (gcd(a, b) != 1) throw PreconditionError("gcd(a, b) must be 1");
    if (gcd(gcd(p1, p2), q) != 1) throw PreconditionError("gcd(p1, p2, q) must be 1");
    if (a < 0 || a >= b) throw PreconditionError("a must lie in [0, b)");
    if (p1 < 0 || p1 >= q || p2 < 0 || p2 >= q) throw PreconditionError("p1, p2 must lie in [0, q)");
    RationalPointCanon r;
    r.a = a;
    r.b = b;
    r.p1 = p1;
    r.p2 = p2;
    r.q = q;
    r.d = gcd(q, ExactInt(b * p1 + a * p2));
    r.d_p = b * q * q / r.d;
    r.a_p = {ExactScalar(r.d, b * q), ExactScalar(b, r.d), ExactScalar(q)};
    for (auto& x : r.a_p) x.canonicalize();
    return r;
}

ExactUnipotent RationalPointCanon::expand() const {
    ExactScalar x12(a, b), x23(p2, q), c(p1, q);
    x12.canonicalize();
    x23.canonicalize();
    c.canonicalize();
    return {x12, x23, c + x12 * x23};
}

RationalPointCanon canonicalize(const ExactUnipotent& g) {
    // fundamental domain (x12, x23, x13 - x12 x23) in [0,1)^3
    ExactUnipotent n = g * ExactUnipotent{0, ExactScalar(-floor_q(g.x23)), 0};
    n = n * ExactUnipotent{ExactScalar(-floor_q(n.x12)), 0, 0};
    ExactScalar c = frac(n.x13 - n.x12 * n.x23);
    ExactInt q = lcm(ExactInt(n.x23.get_den()), ExactInt(c.get_den()));
    ExactInt p2 = ExactScalar(n.x23 * q).get_num();
    ExactInt p1 = ExactScalar(c * q).get_num();
    return RationalPointCanon::make(n.x12.get_num(), n.x12.get_den(), p1, p2, q);
}

ExactInt denominator_formula(const RationalPointCanon& pt) {
    ExactInt d = gcd(pt.q, ExactInt(pt.b * pt.p1 + pt.a * pt.p2));
    return pt.b * pt.q * pt.q / d;
}

ExactInt stabilizer_denominator(const ExactMat3& g) {
    ExactMat3 e31;
    e31.m[2][0] = 1;
    ExactMat3 m = g.inverse() * e31 * g;
    ExactInt den = 1;
    for (auto& row : m.m)
        for (auto& x : row) den = lcm(den, ExactInt(x.get_den()));
    ExactInt gg = 0;
    for (auto& row : m.m)
        for (auto& x : row) gg = gcd(gg, ExactInt(ExactScalar(x * den).get_num()));
    return den / gg;
}

ExactInt denominator_oracle(const ExactUnipotent& g) { return stabilizer_denominator(to_matrix(g)); }

std::array<ExactScalar, 3> polar_component(const RationalPointCanon& pt) {
    std::array<ExactScalar, 3> r{ExactScalar(pt.d, pt.b * pt.q), ExactScalar(pt.b, pt.d), ExactScalar(pt.q)};
    for (auto& x : r) x.canonicalize();
    return r;
}

double kernu_coord(int64_t b, int64_t q, int64_t d, const FlowParams& flow) {
    double y1 = std::log(double(d)) - std::log(double(b)) - std::log(double(q));
    double y3 = std::log(double(q));
    double c = (y3 - y1) / flow.nu();
    return y1 - c * flow.lambda1;
}

double kernu_coord(const RationalPointCanon& pt, const FlowParams& flow) {
    return kernu_coord(pt.b.get_si(), pt.q.get_si(), pt.d.get_si(), flow);
}

std::array<double, 3> BandPoint::coords() const {
    int64_t bq = b * q;
    int64_t num = ((b * p1 + a * p2) % bq + bq) % bq;
    return {double(a) / double(b), double(p2) / double(q), double(num) / double(bq)};
}

double CountBox::volume() const {
    double v = 1;
    for (int i = 0; i < 3; ++i) v *= std::max(0.0, std::min(hi[i], 1.0) - std::max(lo[i], 0.0));
    return v;
}

void CountSpec::validate() const {
    if (!(l >= 1)) throw PreconditionError("band parameter l must be >= 1");
    for (int i = 0; i < 3; ++i)
        if (box.lo[i] < 0 || box.hi[i] > 1 || box.lo[i] > box.hi[i])
            throw PreconditionError("count box must lie inside [0,1]^3");
    if (K_halfwidth && *K_halfwidth < 0) throw PreconditionError("K_halfwidth must be nonnegative");
}

BandRun for_each_band_point(const CountSpec& spec, const std::function<void(const BandPoint&)>& visit,
                            int64_t budget) {
    spec.validate();
    BandRun run;
    const double l = spec.l;
    const int64_t lmax = int64_t(std::floor(l));
    std::vector<BandPoint> group;
    for (int64_t b = 1; b <= lmax; ++b) {
        for (int64_t q = 1; b * q <= lmax; ++q) {
            // d_p = b q^2 / d in [l/2, l]
            std::vector<int64_t> ds;
            for (int64_t d : divisors(q)) {
                int64_t dp = b * (q / d) * q;
                if (!in_band(dp, l)) continue;
                if (spec.K_halfwidth && std::abs(kernu_coord(b, q, d, spec.flow)) > *spec.K_halfwidth) continue;
                ds.push_back(d);
            }
            if (ds.empty()) continue;
            for (int64_t a = 0; a < b; ++a) {
                if (std::gcd(a, b) != 1) continue;
                double x12 = double(a) / double(b);
                if (!(x12 >= spec.box.lo[0] && x12 < spec.box.hi[0])) continue;
                // b x + a y = 1
                int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1, r0 = b, r1 = a;
                while (r1 != 0) {
                    int64_t k = r0 / r1;
                    std::tie(r0, r1) = std::make_pair(r1, r0 - k * r1);
                    std::tie(x0, x1) = std::make_pair(x1, x0 - k * x1);
                    std::tie(y0, y1) = std::make_pair(y1, y0 - k * y1);
                }
                group.clear();
                for (int64_t d : ds) {
                    int64_t qd = q / d;
                    auto md = [q](int64_t v) { return ((v % q) + q) % q; };
                    for (int64_t up = 0; up < qd; ++up) {
                        if (std::gcd(up, qd) != 1) continue;
                        int64_t u = d * up;
                        for (int64_t v = 0; v < q; ++v) {
                            if (std::gcd(v, d) != 1) continue;
                            BandPoint p{a, b, md(md(x0 * u) - md(a * v)), md(md(y0 * u) + md(b * v)), q, d};
                            if (!spec.box.contains(p.coords())) continue;
                            group.push_back(p);
                        }
                    }
                }
                std::sort(group.begin(), group.end(), [](const BandPoint& s, const BandPoint& t) {
                    return std::tie(s.p1, s.p2) < std::tie(t.p1, t.p2);
                });
                for (const auto& p : group) {
                    if (run.emitted >= budget) {
                        run.truncated = true;
                        return run;
                    }
                    visit(p);
                    ++run.emitted;
                }
            }
        }
    }
    return run;
}

RationalPointCanon to_canon(const BandPoint& p) {
    return RationalPointCanon::make(ExactInt(static_cast<long>(p.a)), ExactInt(static_cast<long>(p.b)),
                                    ExactInt(static_cast<long>(p.p1)), ExactInt(static_cast<long>(p.p2)),
                                    ExactInt(static_cast<long>(p.q)));
}

BandStream enumerate_band(const CountSpec& spec, int64_t budget) {
    BandStream s;
    BandRun r = for_each_band_point(spec, [&](const BandPoint& p) { s.points.push_back(to_canon(p)); }, budget);
    s.truncated = r.truncated;
    return s;
}

int64_t count_band(const CountSpec& spec) {
    spec.validate();
    if (!spec.box.unit_in_x23_x13()) {
        int64_t n = 0;
        for_each_band_point(spec, [&](const BandPoint&) { ++n; });
        return n;
    }
    // the residue count does not depend on a, so only x12 needs care
    const double l = spec.l;
    const int64_t lmax = int64_t(std::floor(l));
    int64_t total = 0;
    for (int64_t b = 1; b <= lmax; ++b) {
        int64_t na = 0;
        for (int64_t a = 0; a < b; ++a) {
            if (std::gcd(a, b) != 1) continue;
            double x12 = double(a) / double(b);
            if (x12 >= spec.box.lo[0] && x12 < spec.box.hi[0]) ++na;
        }
        if (na == 0) continue;
        for (int64_t q = 1; b * q <= lmax; ++q) {
            int64_t per = 0;
            for (int64_t d : divisors(q)) {
                if (!in_band(b * (q / d) * q, l)) continue;
                if (spec.K_halfwidth && std::abs(kernu_coord(b, q, d, spec.flow)) > *spec.K_halfwidth) continue;
                per += residue_count(q, d);
            }
            total += na * per;
        }
    }
    return total;
}

int64_t count_family(Family family, int64_t l) {
    if (l < 1) throw PreconditionError("count_family expects l >= 1");
    auto table = phi_table(l + 1);
    const auto& phi = *table;
    int64_t total = 0;
    switch (family) {
        case Family::E1:
            // (0,1,p1,p2,q): d = gcd(q, p1), denominator q^2/d
            for (int64_t q = 1; q <= l; ++q)
                for (int64_t d : divisors(q))
                    if (q / d * q <= l) total += residue_count(q, d);
            break;
        case Family::E2:
            // (a,b,p,0,q) with gcd(p,q) = 1: denominator b q^2 / gcd(q, b)
            for (int64_t b = 1; b <= l; ++b)
                for (int64_t q = 1; b * q <= l; ++q)
                    if (b / std::gcd(q, b) * q * q <= l) total += int64_t(phi[b]) * phi[q];
            break;
        case Family::E3: {
            std::vector<int64_t> prefix(l + 1, 0);
            for (int64_t b = 1; b <= l; ++b) prefix[b] = prefix[b - 1] + phi[b];
            for (int64_t q = 1; q <= l; ++q)
                for (int64_t d : divisors(q)) {
                    // b q^2 / d <= l
                    int64_t bmax = l * d / (q * q);
                    if (bmax >= 1) total += residue_count(q, d) * prefix[std::min(bmax, l)];
                }
            break;
        }
    }
    return total;
}

void write_points_csv(std::ostream& os, const std::vector<RationalPointCanon>& pts, const FlowParams& flow) {
    os << "a,b,p1,p2,q,d,d_p,a_p1,a_p2,a_p3,kernu_coord\n";
    char buf[64];
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.12f", kernu_coord(p, flow));
        os << p.a << ',' << p.b << ',' << p.p1 << ',' << p.p2 << ',' << p.q << ',' << p.d << ',' << p.d_p << ','
           << to_string(p.a_p[0]) << ',' << to_string(p.a_p[1]) << ',' << to_string(p.a_p[2]) << ',' << buf
           << '\n';
    }
}

}  // namespace sl3
