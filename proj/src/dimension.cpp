#include "sl3/dimension.hpp"

#include "sl3/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace sl3 {

FamilyExponents family_exponents(int family, double gamma, const FlowParams& flow) {
    const double a0 = flow.alpha0(), b0 = flow.beta0(), A = flow.highest();
    if (!(gamma >= 0) || !(gamma < A)) throw PreconditionError("gamma must lie in [0, lambda1 - lambda3)");
    FamilyExponents e;
    e.family = family;
    switch (family) {
        case 1:
        case 2: {
            double lead = family == 1 ? b0 : a0;   // root that sets the denominator band
            double other = family == 1 ? a0 : b0;
            if (!(gamma < lead))
                throw PreconditionError(family == 1 ? "family 1 needs gamma < beta0" : "family 2 needs gamma < alpha0");
            e.slope = -A / (lead - gamma);
            e.intercept = (2 * other + lead) / (lead - gamma) + 2;
            break;
        }
        case 3:
            e.slope = -A / (A - gamma);
            e.intercept = A / (A - gamma) + 2;
            break;
        case 4:
        case 5:
            e.slope = -A;
            e.intercept = 3 * A - 2 * gamma;
            break;
        default: throw PreconditionError("family must be in 1..5");
    }
    e.critical_s = -e.intercept / e.slope;
    return e;
}

double critical_dimension(int family, double gamma, const FlowParams& flow) {
    return family_exponents(family, gamma, flow).critical_s;
}

DimensionValue dim_upper_bound(double gamma, const FlowParams& flow) {
    if (!(gamma >= 0)) throw PreconditionError("gamma must be nonnegative");
    const double A = flow.highest();
    if (gamma >= A) return {true, 0};
    return {false, 3 - 2 * gamma / A};
}

DimensionValue dim_full_space(double gamma, const FlowParams& flow) {
    DimensionValue v = dim_upper_bound(gamma, flow);
    if (!v.empty) v.value += 5;
    return v;
}

Box3 shrink_box(double d_q, double gamma_eff, const FlowParams& flow, double epsilon0) {
    const double A = flow.highest();
    const double denom = A - gamma_eff;
    return {epsilon0 * std::pow(d_q, -flow.alpha0() / denom), epsilon0 * std::pow(d_q, -flow.beta0() / denom),
            epsilon0 * std::pow(d_q, -A / denom)};
}

namespace {

ExactScalar exact_of(double x) { return ExactScalar(x); }

ExactInt ceil_q(const ExactScalar& x) {
    ExactInt r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

ExactInt floor_q(const ExactScalar& x) {
    ExactInt r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

// True unless the two closed boxes are provably disjoint. Points of the two
// sets coincide only if exp(-x') exp(x) = q' w q^{-1} with w in Γ ∩ N+, and the
// log of the left side lies in the box with half-widths R below.
bool may_overlap(const ExactUnipotent& q, const Box3& r, const ExactUnipotent& qq, const Box3& rr) {
    const ExactScalar R1 = exact_of(r.r1) + exact_of(rr.r1);
    const ExactScalar R2 = exact_of(r.r2) + exact_of(rr.r2);
    const ExactScalar R3 = exact_of(r.r3) + exact_of(rr.r3) +
                           (exact_of(r.r1) * exact_of(rr.r2) + exact_of(rr.r1) * exact_of(r.r2)) / 2;
    const ExactScalar s12 = q.x12 - qq.x12, s23 = q.x23 - qq.x23;
    for (ExactInt w12 = ceil_q(s12 - R1); w12 <= floor_q(s12 + R1); ++w12) {
        ExactScalar h12 = ExactScalar(w12) - s12;
        for (ExactInt w23 = ceil_q(s23 - R2); w23 <= floor_q(s23 + R2); ++w23) {
            ExactScalar h23 = ExactScalar(w23) - s23;
            ExactScalar base = qq.x13 + qq.x12 * ExactScalar(w23) + q.x12 * q.x23 - q.x13 -
                               (qq.x12 + ExactScalar(w12)) * q.x23 - h12 * h23 / 2;
            if (ceil_q(-R3 - base) <= floor_q(R3 - base)) return true;
        }
    }
    return false;
}

double torus_gap(double a, double b) {
    double d = std::abs(a - b);
    d -= std::floor(d);
    return std::min(d, 1 - d);
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

ShrinkResult disjoint_shrink_boxes(const std::vector<RationalPointCanon>& points, double gamma_eff,
                                   const FlowParams& flow, double epsilon0) {
    if (!(gamma_eff < flow.highest())) throw PreconditionError("gamma_eff must be below lambda1 - lambda3");
    if (!(epsilon0 > 0)) throw PreconditionError("epsilon0 must be positive");
    ShrinkResult out;
    out.epsilon0 = epsilon0;
    if (points.empty()) return out;

    std::set<std::tuple<ExactInt, ExactInt, ExactInt, ExactInt, ExactInt>> seen;
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
    for (const auto& p : points) {
        if (!seen.insert({p.a, p.b, p.p1, p.p2, p.q}).second)
            throw DegenerateBand("duplicate rational point: boxes can never separate");
        double d = p.d_p.get_d();
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmax > 2 * dmin) throw PreconditionError("points must share a denominator band [l/2, l]");

    const size_t n = points.size();
    std::vector<ExactUnipotent> centers(n);
    std::vector<std::array<double, 2>> planar(n);
    for (size_t i = 0; i < n; ++i) {
        centers[i] = points[i].expand();
        planar[i] = {frac(centers[i].x12.get_d()), frac(centers[i].x23.get_d())};
    }

    double eps = epsilon0;
    for (;;) {
        if (eps < std::ldexp(1.0, -20)) throw DegenerateBand("epsilon0 fell below 2^-20 without separating the boxes");
        std::vector<Box3> boxes(n);
        double m1 = 0, m2 = 0;
        for (size_t i = 0; i < n; ++i) {
            boxes[i] = shrink_box(points[i].d_p.get_d(), gamma_eff, flow, eps);
            m1 = std::max(m1, boxes[i].r1);
            m2 = std::max(m2, boxes[i].r2);
        }
        const int64_t n1 = std::clamp<int64_t>(int64_t(1 / (2 * m1)), 1, 4096);
        const int64_t n2 = std::clamp<int64_t>(int64_t(1 / (2 * m2)), 1, 4096);
        std::unordered_map<int64_t, std::vector<size_t>> grid;
        auto cell_of = [&](size_t i) {
            int64_t c1 = std::min<int64_t>(int64_t(planar[i][0] * n1), n1 - 1);
            int64_t c2 = std::min<int64_t>(int64_t(planar[i][1] * n2), n2 - 1);
            return std::pair{c1, c2};
        };
        for (size_t i = 0; i < n; ++i) {
            auto [c1, c2] = cell_of(i);
            grid[c1 * n2 + c2].push_back(i);
        }
        bool clash = false;
        for (size_t i = 0; i < n && !clash; ++i) {
            auto [c1, c2] = cell_of(i);
            std::set<int64_t> cells;
            for (int64_t a = -1; a <= 1; ++a)
                for (int64_t b = -1; b <= 1; ++b) cells.insert(((c1 + a + n1) % n1) * n2 + (c2 + b + n2) % n2);
            for (int64_t cell : cells) {
                auto it = grid.find(cell);
                if (it == grid.end()) continue;
                for (size_t j : it->second) {
                    if (j <= i) continue;
                    const double slack = 1e-9;
                    if (torus_gap(planar[i][0], planar[j][0]) > boxes[i].r1 + boxes[j].r1 + slack) continue;
                    if (torus_gap(planar[i][1], planar[j][1]) > boxes[i].r2 + boxes[j].r2 + slack) continue;
                    if (may_overlap(centers[i], boxes[i], centers[j], boxes[j])) {
                        clash = true;
                        break;
                    }
                }
                if (clash) break;
            }
        }
        if (!clash) {
            out.epsilon0 = eps;
            out.boxes.reserve(n);
            for (size_t i = 0; i < n; ++i) out.boxes.push_back({points[i], boxes[i]});
            return out;
        }
        eps /= 2;
        ++out.halvings;
    }
}

double Cube::diameter() const {
    double h3 = half[2] + 0.5 * (half[0] * std::abs(shear[1]) + half[1] * std::abs(shear[0]));
    return 2 * std::sqrt(half[0] * half[0] + half[1] * half[1] + h3 * h3);
}

bool Cube::contains_log(const std::array<double, 3>& y) const {
    return std::abs(y[0]) <= half[0] && std::abs(y[1]) <= half[1] &&
           std::abs(y[2] - 0.5 * (y[0] * shear[1] - y[1] * shear[0])) <= half[2];
}

namespace {

// Representative q γ (γ ∈ Γ ∩ N+) nearest to g, with log(q γ g^{-1}).
std::pair<UnipotentUpper, std::array<double, 3>> nearest_rep(const UnipotentUpper& q, const UnipotentUpper& g) {
    UnipotentUpper rep = q * UnipotentUpper{std::round(g.x12 - q.x12), std::round(g.x23 - q.x23), 0};
    UnipotentUpper x = rep * g.inverse();
    double k = std::round(-x.log()[2]);
    rep.x13 += k;
    x.x13 += k;
    return {rep, x.log()};
}

// Representative of q inside the parent, if any. The nearest one is the only
// candidate except on ties at half-width 1/2, where the neighbours are tried too.
std::optional<std::pair<UnipotentUpper, std::array<double, 3>>> locate(const UnipotentUpper& q, const Cube& parent) {
    auto best = nearest_rep(q, parent.base);
    if (parent.contains_log(best.second)) return best;
    const double edge = 0.5 - 1e-12;
    if (std::abs(best.second[0]) < edge && std::abs(best.second[1]) < edge) return std::nullopt;
    for (int d12 = -1; d12 <= 1; ++d12)
        for (int d23 = -1; d23 <= 1; ++d23) {
            UnipotentUpper rep = best.first * UnipotentUpper{double(d12), double(d23), 0};
            UnipotentUpper x = rep * parent.base.inverse();
            double k = std::round(-x.log()[2]);
            rep.x13 += k;
            x.x13 += k;
            if (parent.contains_log(x.log())) return std::pair{rep, x.log()};
        }
    return std::nullopt;
}

// Image of y (log coordinates around rep) in log coordinates around g, where
// rep = exp(w) g.
std::array<double, 3> shift_log(const std::array<double, 3>& y, const std::array<double, 3>& w) {
    return {y[0] + w[0], y[1] + w[1], y[2] + w[2] + 0.5 * (y[0] * w[1] - y[1] * w[0])};
}

bool block_inside(const Cube& parent, const std::array<double, 3>& w, const std::array<double, 3>& c,
                  const std::array<double, 3>& h) {
    for (int s = 0; s < 8; ++s) {
        std::array<double, 3> y{c[0] + ((s & 1) ? h[0] : -h[0]), c[1] + ((s & 2) ? h[1] : -h[1]),
                                c[2] + ((s & 4) ? h[2] : -h[2])};
        if (!parent.contains_log(shift_log(y, w))) return false;
    }
    return true;
}

// Sub-cubes with centers (c0, -r2 + (2b+1) h1, 0) contained in the parent: the
// containment constraints are affine in the second center coordinate, so the
// admissible b form one range [lo, hi] (empty when lo > hi).
std::pair<int64_t, int64_t> contained_row(const Cube& parent, const std::array<double, 3>& w, double c0,
                                          const std::array<double, 3>& h, double r2, int64_t n2) {
    const std::pair<int64_t, int64_t> none{1, 0};
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    const auto& H = parent.half;
    const auto& sh = parent.shear;
    const double k = 0.5 * (sh[0] - w[0]);
    for (int s = 0; s < 8; ++s) {
        const double v0 = (s & 1) ? h[0] : -h[0], v1 = (s & 2) ? h[1] : -h[1], v2 = (s & 4) ? h[2] : -h[2];
        const double x0 = c0 + v0 + w[0];
        if (std::abs(x0) > H[0]) return none;
        lo = std::max(lo, -H[1] - v1 - w[1]);
        hi = std::min(hi, H[1] - v1 - w[1]);
        const double t0 = v2 + w[2] + 0.5 * ((c0 + v0) * w[1] - v1 * w[0]) - 0.5 * x0 * sh[1] + 0.5 * (v1 + w[1]) * sh[0];
        if (k == 0) {
            if (std::abs(t0) > H[2]) return none;
            continue;
        }
        double a = (-H[2] - t0) / k, b = (H[2] - t0) / k;
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    }
    if (lo > hi) return none;
    int64_t blo = std::max<int64_t>(0, int64_t(std::ceil((lo + r2) / (2 * h[1]) - 0.5)));
    int64_t bhi = std::min<int64_t>(n2 - 1, int64_t(std::floor((hi + r2) / (2 * h[1]) - 0.5)));
    return {blo, bhi};
}

struct ParentGrid {
    int64_t n1 = 1, n2 = 1;
    std::unordered_map<int64_t, std::vector<int>> cells;

    explicit ParentGrid(const std::vector<Cube>& parents) {
        double m1 = 0, m2 = 0;
        for (const auto& p : parents) {
            m1 = std::max(m1, p.half[0]);
            m2 = std::max(m2, p.half[1]);
        }
        n1 = std::clamp<int64_t>(int64_t(1 / (2 * m1)), 1, 4096);
        n2 = std::clamp<int64_t>(int64_t(1 / (2 * m2)), 1, 4096);
        for (size_t i = 0; i < parents.size(); ++i) cells[key(parents[i].base.x12, parents[i].base.x23)].push_back(int(i));
    }
    int64_t key(double x12, double x23) const {
        int64_t c1 = std::min<int64_t>(int64_t(frac(x12) * n1), n1 - 1);
        int64_t c2 = std::min<int64_t>(int64_t(frac(x23) * n2), n2 - 1);
        return c1 * n2 + c2;
    }
    template <class F>
    void around(double x12, double x23, F&& f) const {
        int64_t c1 = std::min<int64_t>(int64_t(frac(x12) * n1), n1 - 1);
        int64_t c2 = std::min<int64_t>(int64_t(frac(x23) * n2), n2 - 1);
        std::array<int64_t, 9> seen{};
        int ns = 0;
        for (int64_t a = -1; a <= 1; ++a)
            for (int64_t b = -1; b <= 1; ++b) {
                int64_t k = ((c1 + a + n1) % n1) * n2 + (c2 + b + n2) % n2;
                if (std::find(seen.begin(), seen.begin() + ns, k) != seen.begin() + ns) continue;
                seen[ns++] = k;
                auto it = cells.find(k);
                if (it == cells.end()) continue;
                for (int idx : it->second)
                    if (f(idx)) return;
            }
    }
};

}  // namespace

std::vector<TreeLevel> cantor_build(const Box3& U0, double gamma, double epsilon, double K_halfwidth,
                                    const std::vector<double>& schedule, const FlowParams& flow,
                                    const CantorOptions& options) {
    const double gamma_eff = gamma + epsilon;
    if (!(gamma >= 0) || !(epsilon > 0)) throw PreconditionError("need gamma >= 0 and epsilon > 0");
    if (!(gamma_eff < flow.highest())) throw PreconditionError("gamma + epsilon must be below lambda1 - lambda3");
    if (schedule.empty()) throw PreconditionError("schedule must contain at least one level");
    for (size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] >= 2)) throw PreconditionError("schedule entries must be >= 2");
        if (i > 0 && !(schedule[i] > schedule[i - 1])) throw PreconditionError("schedule must be increasing");
    }
    if (!(U0.r1 > 0 && U0.r2 > 0 && U0.r3 > 0)) throw PreconditionError("U0 must have positive half-widths");

    // l_j >= l_{j-1}^{(j-1)^2}
    const std::string kGrowthWarning = "schedule violates l_j >= l_{j-1}^{(j-1)^2}";
    std::vector<bool> faithful(schedule.size(), true);
    for (size_t i = 1; i < schedule.size(); ++i)
        faithful[i] = schedule[i] >= std::pow(schedule[i - 1], double(i * i));
    if (!options.desk_mode && std::find(faithful.begin(), faithful.end(), false) != faithful.end())
        throw PreconditionError(kGrowthWarning);

    std::vector<Cube> parents{Cube{UnipotentUpper{0, 0, 0}, {U0.r1, U0.r2, U0.r3}, {0, 0}}};
    std::vector<TreeLevel> levels;

    for (size_t li = 0; li < schedule.size(); ++li) {
        const bool last = li + 1 == schedule.size();
        TreeLevel level;
        level.j = int(li + 1);
        level.l_j = schedule[li];
        if (!faithful[li]) {
            level.paper_faithful = false;
            level.warning = kGrowthWarning;
        }

        CountSpec spec;
        spec.l = schedule[li];
        spec.flow = flow;
        if (K_halfwidth > 0 && std::isfinite(K_halfwidth)) spec.K_halfwidth = K_halfwidth;

        ParentGrid grid(parents);
        std::vector<TreeChild> children;
        BandRun run = for_each_band_point(spec, [&](const BandPoint& bp) {
            auto c = bp.coords();
            UnipotentUpper q{c[0], c[1], c[2]};
            grid.around(q.x12, q.x23, [&](int idx) {
                auto found = locate(q, parents[idx]);
                if (!found) return false;
                const UnipotentUpper& rep = found->first;
                TreeChild ch;
                ch.point = bp;
                ch.center = {rep.x12, rep.x23, rep.x13};
                ch.parent = idx;
                children.push_back(ch);
                return true;
            });
        }, options.budget);
        if (run.truncated)
            throw BudgetExceeded("level " + std::to_string(level.j) + ": band enumeration budget exhausted", 0);

        std::vector<int64_t> per_parent(parents.size(), 0);
        for (const auto& ch : children) ++per_parent[ch.parent];
        for (size_t p = 0; p < parents.size(); ++p)
            if (per_parent[p] == 0)
                throw PreconditionError("level " + std::to_string(level.j) +
                                        ": a parent cube has no children (schedule too aggressive)");

        std::vector<RationalPointCanon> canon;
        canon.reserve(children.size());
        for (const auto& ch : children) canon.push_back(to_canon(ch.point));
        ShrinkResult shrunk = disjoint_shrink_boxes(canon, gamma_eff, flow, options.epsilon0);
        level.epsilon0_final = shrunk.epsilon0;

        std::vector<double> covered(parents.size(), 0);
        std::vector<Cube> next;
        int64_t cube_count = 0;
        double dmax = 0;
        for (size_t i = 0; i < children.size(); ++i) {
            TreeChild& ch = children[i];
            ch.box = shrunk.boxes[i].box;
            const Box3& r = ch.box;
            const int64_t n1 = std::max<int64_t>(1, int64_t(r.r1 / r.r3));
            const int64_t n2 = std::max<int64_t>(1, int64_t(r.r2 / r.r3));
            const std::array<double, 3> h{r.r1 / n1, r.r2 / n2, r.r3};
            ch.side = 2 * std::max({h[0], h[1], h[2]});
            const Cube& parent = parents[ch.parent];
            UnipotentUpper rep{ch.center[0], ch.center[1], ch.center[2]};
            std::array<double, 3> w = (rep * parent.base.inverse()).log();
            const bool whole = block_inside(parent, w, {0, 0, 0}, {r.r1, r.r2, r.r3});
            int64_t inside = 0;
            if (whole && last) {
                // nothing to materialize: all cubes count, the corner ones have the largest shear
                inside = n1 * n2;
                Cube corner{rep, h, {r.r1 - h[0], r.r2 - h[1]}};
                dmax = std::max(dmax, corner.diameter());
                cube_count += inside;
                covered[ch.parent] += double(inside) * 8 * h[0] * h[1] * h[2];
                continue;
            }
            for (int64_t a = 0; a < n1; ++a) {
                const double c0 = -r.r1 + (2 * a + 1) * h[0];
                auto [blo, bhi] = whole ? std::pair<int64_t, int64_t>{0, n2 - 1}
                                        : contained_row(parent, w, c0, h, r.r2, n2);
                if (blo > bhi) continue;
                inside += bhi - blo + 1;
                double c1max = std::max(std::abs(-r.r2 + (2 * blo + 1) * h[1]), std::abs(-r.r2 + (2 * bhi + 1) * h[1]));
                dmax = std::max(dmax, Cube{rep, h, {c0, c1max}}.diameter());
                if (last) continue;
                for (int64_t b = blo; b <= bhi; ++b) {
                    std::array<double, 3> c{c0, -r.r2 + (2 * b + 1) * h[1], 0};
                    next.push_back(Cube{UnipotentUpper::exp(c) * rep, h, {-c[0], -c[1]}});
                }
            }
            cube_count += inside;
            covered[ch.parent] += double(inside) * 8 * h[0] * h[1] * h[2];
        }

        double delta = std::numeric_limits<double>::infinity();
        for (size_t p = 0; p < parents.size(); ++p) delta = std::min(delta, covered[p] / parents[p].volume());
        if (!(delta > 0))
            throw PreconditionError("level " + std::to_string(level.j) + ": a parent cube contains no child cube");

        level.delta_j = delta;
        level.d_j = dmax;
        level.parent_count = int64_t(parents.size());
        level.child_count = int64_t(children.size());
        level.cube_count = cube_count;
        level.parents = std::move(parents);
        if (options.keep_children) level.children = std::move(children);
        levels.push_back(std::move(level));
        parents = std::move(next);
    }
    return levels;
}

double treelike_lower_bound(const std::vector<double>& deltas, double d_last, int ambient_dim) {
    if (deltas.empty()) throw PreconditionError("need at least one level");
    if (!(d_last > 0) || !(d_last < 1)) throw PreconditionError("the deepest diameter must lie in (0, 1)");
    double s = 0;
    for (double dl : deltas) {
        if (!(dl > 0) || dl > 1) throw PreconditionError("level ratios must lie in (0, 1]");
        s += std::log(dl);
    }
    return ambient_dim - s / std::log(d_last);
}

double treelike_lower_bound(const std::vector<TreeLevel>& levels, int ambient_dim) {
    std::vector<double> deltas;
    for (const auto& l : levels) deltas.push_back(l.delta_j);
    if (levels.empty()) throw PreconditionError("need at least one level");
    return treelike_lower_bound(deltas, levels.back().d_j, ambient_dim);
}

double box_counting_dim(const std::vector<std::array<double, 3>>& points, const std::vector<double>& scales) {
    if (scales.size() < 2) throw PreconditionError("box counting needs at least two scales");
    for (size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0)) throw PreconditionError("scales must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1])) throw PreconditionError("scales must be decreasing");
    }
    if (points.empty()) throw PreconditionError("box counting needs points");
    bool all_equal = std::all_of(points.begin(), points.end(), [&](const auto& p) { return p == points[0]; });
    if (all_equal) return 0;

    std::vector<double> xs, ys;
    for (double delta : scales) {
        const int64_t n = int64_t(std::ceil(1 / delta));
        std::unordered_set<int64_t> occupied;
        for (const auto& p : points) {
            int64_t k = 0;
            for (int i = 0; i < 3; ++i) {
                int64_t c = std::clamp<int64_t>(int64_t(std::floor(p[i] / delta)), 0, n - 1);
                k = k * n + c;
            }
            occupied.insert(k);
        }
        xs.push_back(std::log(1 / delta));
        ys.push_back(std::log(double(occupied.size())));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace sl3
