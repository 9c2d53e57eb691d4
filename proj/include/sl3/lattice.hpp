#pragma once

#include "sl3/exact.hpp"
#include "sl3/lie.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sl3 {

// Row basis: rank vectors in R^dim.
struct LatticeBasis {
    int rank = 0;
    int dim = 0;
    std::vector<double> v;

    LatticeBasis() = default;
    LatticeBasis(int rank_, int dim_) : rank(rank_), dim(dim_), v(size_t(rank_) * dim_, 0.0) {}

    double* row(int i) { return v.data() + size_t(i) * dim; }
    const double* row(int i) const { return v.data() + size_t(i) * dim; }
    double norm2(int i) const;
};

struct LllResult {
    LatticeBasis basis;
    std::vector<int64_t> transform;  // rank x rank, reduced rows = transform * input rows
};

LllResult lll_reduce(const LatticeBasis& basis, double delta = 0.99);
bool lovasz_holds(const LatticeBasis& basis, double delta);

struct ShortVectorResult {
    double value = 0;
    std::vector<int64_t> witness;  // coefficients in the input basis
    double exhaustive_below = 0;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double best) : std::runtime_error(what), best_found(best) {}
    double best_found;
};

// Calls visit(coeffs, norm2) for every nonzero lattice vector of norm <= radius
// whose last nonzero coefficient is positive (one of each ±pair). Coefficients
// refer to the given basis, which should be LLL-reduced.
void enumerate_ball(const LatticeBasis& basis, double radius,
                    const std::function<void(const std::vector<int64_t>&, double)>& visit,
                    int64_t node_budget = 50'000'000);

ShortVectorResult shortest_vector(const LatticeBasis& basis, int64_t node_budget = 50'000'000);

LatticeBasis lattice_of(const Mat3& g);  // the lattice g Z^3
double systole(const Mat3& g);

enum class Gauge { Log, Frobenius };
const char* gauge_name(Gauge g);

struct InjectivityResult {
    double eta = 0;
    IntegerMat3 witness;  // the element of SL3(Z) realizing eta
    Gauge gauge = Gauge::Log;
    bool certified = false;
    double searched_radius = 0;
    int64_t rejected = 0;  // lattice points discarded by the det(I+E)=1 filter
};

// Lower bound on the gauge of any stabilizer element v with ||v - I||_F = f
// (in the scaled frame): log1p(f)/sqrt(12) always, sharpened for nilpotent v - I.
// It is increasing, so a search complete up to radius R certifies every value
// up to gauge_lower_bound(R).
double gauge_lower_bound(double frobenius);
double certified_gauge_bound(double radius);

// Stabilizer search for g = diag(exp(y)) * n with n exact. Keeps the reduced
// integer basis of {E : n E n^{-1}} between calls so that nearby diagonal parts
// start from a nearly reduced basis.
class StabilizerSearch {
public:
    explicit StabilizerSearch(const ExactMat3& n);

    InjectivityResult search(const std::array<double, 3>& log_diag, double search_radius,
                             int64_t node_budget = 50'000'000);

private:
    void reduce_at(const std::array<double, 3>& y);
    LatticeBasis basis_at(const std::array<double, 3>& y) const;
    void apply_transform(const std::vector<int64_t>& t);

    ExactMat3 n_, n_inv_;
    std::array<IntegerMat3, 9> e_;
    std::array<ExactMat3, 9> conj_;  // n e_k n^{-1}
    std::array<double, 3> last_y_{};
    bool warm_ = false;
};

InjectivityResult injectivity_radius(const Mat3& g, double search_radius = 4.0);

}  // namespace sl3
