#include "sl3/diophantine.hpp"

#include "sl3/rational_points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sl3 {

OrbitSeries orbit_eta_series(const ExactUnipotent& p, const FlowParams& flow, const std::vector<double>& t_grid,
                             double search_radius, int64_t node_budget) {
    for (size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0)) throw PreconditionError("t_grid must be nonnegative");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw PreconditionError("t_grid must be strictly increasing");
    }
    OrbitSeries out;
    out.base_point = to_double(p);
    out.flow = flow;
    // eta is Γ-invariant on the right, so work with the reduced representative
    StabilizerSearch search(to_matrix(reduce_mod_gamma(p).rep));
    const auto lam = flow.lambdas();
    for (double t : t_grid) {
        InjectivityResult r = search.search({t * lam[0], t * lam[1], t * lam[2]}, search_radius, node_budget);
        OrbitSample s;
        s.t = t;
        s.eta = r.eta;
        s.gauge = r.gauge;
        s.certified = r.certified;
        s.searched_radius = r.searched_radius;
        s.witness = r.witness;
        out.samples.push_back(s);
    }
    return out;
}

double estimate_type(const OrbitSeries& series, double t_min, double t_max) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : series.samples)
        if (s.t >= t_min && s.t <= t_max) pts.emplace_back(s.t, -std::log(s.eta));
    if (pts.size() < 8) throw PreconditionError("estimate_type needs at least 8 samples in the window");
    double mt = 0, my = 0;
    for (auto& [t, y] : pts) mt += t, my += y;
    mt /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto& [t, y] : pts) {
        sxy += (t - mt) * (y - my);
        sxx += (t - mt) * (t - mt);
    }
    if (sxx == 0) throw PreconditionError("estimate_type needs distinct sample times");
    return sxy / sxx;
}

std::pair<bool, GammaWitness> gamma_condition_check(const Mat3& v, double t, double gamma,
                                                    const ConstantsProfile& constants) {
    Mat3 n = v - Mat3::identity();
    Mat3 n3 = n * n * n;
    RootCoords c;
    if (n3.max_abs() <= 1e-12 * std::max(1.0, n.max_abs()))
        c = log_unipotent(v, 1e-9);
    else if (n.frobenius() < 1)
        c = coords_of(log_near_identity(v));
    else
        throw PreconditionError("log v undefined: v is neither unipotent nor close to the identity");

    GammaWitness w;
    w.t = t;
    w.v_minus_norm = minus_block_norm(c);
    w.v_zero_norm = zero_block_norm(c);
    w.v_plus_norm = plus_block_norm(c);
    const double band = std::exp(-gamma * t);
    const double k = constants.kappa_prime;
    bool ok = w.v_minus_norm >= band / k && w.v_minus_norm <= k * band && w.v_zero_norm <= k * band &&
              w.v_plus_norm <= k * band;
    return {ok, w};
}

int weyl_index_of_pivots(int row, int col) {
    static const int table[3][3] = {{0, 5, 6}, {2, 0, 4}, {1, 3, 0}};
    if (row < 1 || row > 3 || col < 1 || col > 3) return 0;
    return table[row - 1][col - 1];
}

WeylType weyl_type(const ExactMat3& v) {
    ExactMat3 n = v - ExactMat3::identity();
    ExactMat3 zero;
    if (n == zero) throw NotNuConjugate("not conjugate into N_nu: v = I");
    if (n * n != zero) throw NotNuConjugate("not conjugate into N_nu: (v - I)^2 != 0");
    // (v-I)^2 = 0 with v != I forces rank 1, so v - I = u w^T
    int i0 = -1, j0 = -1;
    for (int j = 0; j < 3 && j0 < 0; ++j)
        for (int i = 0; i < 3; ++i)
            if (n(i, j) != 0) {
                i0 = i;
                j0 = j;
                break;
            }
    std::array<ExactScalar, 3> u{n(0, j0), n(1, j0), n(2, j0)}, w;
    for (int j = 0; j < 3; ++j) w[j] = n(i0, j) / u[i0];
    int last_u = 2;
    while (u[last_u] == 0) --last_u;
    int first_w = 0;
    while (w[first_w] == 0) ++first_w;
    WeylType out;
    out.pivot_pair = {last_u + 1, first_w + 1};
    out.index = weyl_index_of_pivots(last_u + 1, first_w + 1);
    if (out.index == 0) throw NotNuConjugate("diagonal pivot pair: inconsistent rank-1 factorization");
    return out;
}

double nonemptiness_threshold(const FlowParams& flow) { return flow.highest(); }

namespace {

// Integer upper unipotent γ with p γ q^{-1} as close to the identity as the
// rounding of the Heisenberg coordinates allows.
IntegerMat3 align_unipotent(const ExactUnipotent& p, const ExactUnipotent& q) {
    auto round_q = [](const ExactScalar& x) {
        ExactScalar h = x + ExactScalar(1, 2);
        ExactInt f;
        mpz_fdiv_q(f.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
        return f;
    };
    ExactInt g12 = round_q(q.x12 - p.x12);
    ExactInt g23 = round_q(q.x23 - p.x23);
    ExactUnipotent g0{ExactScalar(g12), ExactScalar(g23), 0};
    ExactUnipotent x = p * g0 * q.inverse();
    ExactInt g13 = round_q(-x.log()[2]);
    IntegerMat3 out = IntegerMat3::identity();
    out(0, 1) = g12;
    out(1, 2) = g23;
    out(0, 2) = g13;
    return out;
}

struct BandTest {
    double lo, hi;
};

bool inside(double x, const BandTest& b, bool& near) {
    auto close = [](double a, double c) { return std::abs(a - c) <= 1e-9 * std::max(std::abs(a), std::abs(c)); };
    if (close(x, b.lo) || close(x, b.hi)) near = true;
    return x >= b.lo && x <= b.hi;
}

}  // namespace

MembershipReport family_membership_report(const MembershipQuery& query, const FlowParams& flow,
                                          const ConstantsProfile& constants) {
    const int family = query.family;
    if (family < 1 || family > 5) throw PreconditionError("family must be in 1..5");
    if (query.q.det() != 1 || query.p.det() != 1) throw PreconditionError("representatives must have det 1");

    IntegerMat3 witness;
    if (query.witness) {
        witness = *query.witness;
        if (witness.det() != 1) throw PreconditionError("witness must lie in SL3(Z)");
    } else if (family <= 2) {
        throw PreconditionError("families 1 and 2 need an explicit Γ-witness");
    } else if (query.p.is_upper_unipotent() && query.q.is_upper_unipotent()) {
        witness = align_unipotent(unipotent_of(query.p), unipotent_of(query.q));
    } else {
        throw PreconditionError("no witness given and representatives are not upper unipotent");
    }

    MembershipReport rep;
    rep.d_q = stabilizer_denominator(query.q).get_d();

    ExactMat3 x = query.p * witness.to_exact() * query.q.inverse();
    if (family == 1) x = x * weyl(3);
    if (family == 2) x = x * weyl(2);

    const double t = query.t;
    const double a0 = flow.alpha0(), b0 = flow.beta0(), ab = flow.highest();
    const double C = constants.C, k2 = constants.kappa_double_prime;
    const double g = query.gamma;

    if (!x.is_upper_unipotent()) return rep;
    ExactUnipotent xu = unipotent_of(x);

    bool ok = true;
    bool near = false;
    auto within = [&](double v, double r) {
        BandTest b{-r, r};
        return inside(v, b, near);
    };
    std::array<ExactScalar, 3> lx = xu.log();

    switch (family) {
        case 1:
        case 2: {
            int zero_slot = family == 1 ? 0 : 1;
            if (lx[zero_slot] != 0) ok = false;
            rep.displacement = {lx[0].get_d(), lx[1].get_d(), lx[2].get_d()};
            double r_free = C * std::exp(-(family == 1 ? b0 : a0) * t);
            ok = ok && within(rep.displacement[1 - zero_slot], r_free);
            ok = ok && within(rep.displacement[2], C * std::exp(-ab * t));
            double center = std::exp(((family == 1 ? b0 : a0) - g) * t);
            rep.band_lo = center / k2;
            rep.band_hi = k2 * center;
            ok = inside(rep.d_q, {rep.band_lo, rep.band_hi}, near) && ok;
            break;
        }
        case 3: {
            rep.displacement = {lx[0].get_d(), lx[1].get_d(), lx[2].get_d()};
            ok = within(rep.displacement[0], C * std::exp(-a0 * t));
            ok = within(rep.displacement[1], C * std::exp(-b0 * t)) && ok;
            ok = within(rep.displacement[2], C * std::exp(-ab * t)) && ok;
            double center = std::exp((ab - g) * t);
            rep.band_lo = center / (3 * k2);
            rep.band_hi = k2 * center;
            ok = inside(rep.d_q, {rep.band_lo, rep.band_hi}, near) && ok;
            break;
        }
        default: {
            // x = b y with y on the root line, b without that root component
            bool alpha_line = family == 4;
            ExactScalar s = alpha_line ? xu.x12 : xu.x23;
            ExactUnipotent y = alpha_line ? ExactUnipotent{s, 0, 0} : ExactUnipotent{0, s, 0};
            ExactUnipotent b = xu * y.inverse();
            auto lb = b.log();
            rep.displacement = {lb[0].get_d(), lb[1].get_d(), lb[2].get_d()};
            rep.line_factor = std::abs(s.get_d());
            if (alpha_line)
                ok = within(rep.displacement[1], C * std::exp(-b0 * t));
            else
                ok = within(rep.displacement[0], C * std::exp(-a0 * t));
            ok = within(rep.displacement[2], C * std::exp(-ab * t)) && ok;
            double center = std::exp(-g * t) * std::exp((alpha_line ? b0 : a0) * t);
            rep.band_lo = center / (3 * k2);
            rep.band_hi = k2 * center;
            ok = inside(rep.line_factor * rep.d_q, {rep.band_lo, rep.band_hi}, near) && ok;
            ok = inside(rep.d_q, {0, k2 * std::exp((ab - g) * t)}, near) && ok;
            break;
        }
    }
    rep.member = ok;
    rep.near_boundary = near;
    return rep;
}

bool family_membership(const MembershipQuery& query, const FlowParams& flow, const ConstantsProfile& constants) {
    return family_membership_report(query, flow, constants).member;
}

FormalReal::FormalReal(const ExactScalar& c) {
    if (c != 0) terms_[{}] = c;
}

FormalReal FormalReal::variable(int index) {
    if (index < 0) throw PreconditionError("variable index must be nonnegative");
    FormalReal r;
    std::vector<int> mono(index + 1, 0);
    mono[index] = 1;
    r.terms_[mono] = 1;
    return r;
}

void FormalReal::prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = it->second == 0 ? terms_.erase(it) : std::next(it);
}

bool FormalReal::is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

ExactScalar FormalReal::constant() const {
    auto it = terms_.find({});
    return it == terms_.end() ? ExactScalar(0) : it->second;
}

FormalReal operator+(const FormalReal& a, const FormalReal& b) {
    FormalReal r = a;
    for (auto& [m, c] : b.terms_) r.terms_[m] += c;
    r.prune();
    return r;
}

FormalReal operator-(const FormalReal& a, const FormalReal& b) {
    FormalReal r = a;
    for (auto& [m, c] : b.terms_) r.terms_[m] -= c;
    r.prune();
    return r;
}

FormalReal operator*(const FormalReal& a, const FormalReal& b) {
    FormalReal r;
    for (auto& [ma, ca] : a.terms_)
        for (auto& [mb, cb] : b.terms_) {
            std::vector<int> m(std::max(ma.size(), mb.size()), 0);
            for (size_t i = 0; i < ma.size(); ++i) m[i] += ma[i];
            for (size_t i = 0; i < mb.size(); ++i) m[i] += mb[i];
            while (!m.empty() && m.back() == 0) m.pop_back();
            r.terms_[m] += ca * cb;
        }
    r.prune();
    return r;
}

// N_{α0}(s) n(Q) = (s + r12, r23, r13 + s r23): x23 and x13 - x12 x23 are rational.
// N_{β0}(s) n(Q) = (r12, s + r23, r13): x12 and x13 are rational.
// Right multiplication by Γ ∩ N+ keeps both descriptions.
LineStructure rational_line_structure(const FormalUnipotent& p) {
    LineStructure out;
    out.alpha_line = p.x23.is_rational() && (p.x13 - p.x12 * p.x23).is_rational();
    out.beta_line = p.x12.is_rational() && p.x13.is_rational();
    return out;
}

}  // namespace sl3
