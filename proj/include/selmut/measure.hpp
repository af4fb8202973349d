#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace selmut {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |total_mass - 1| within this bound qualifies as a probability measure.
inline constexpr double kProbabilityTolerance = 1e-9;

struct Atom {
    double x = 0.0;
    double m = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Raised for malformed measure input (bad location, negative mass, ...).
class MeasureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Set of reals with independently open/closed endpoints.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
    /// [lo, hi)
    static Interval right_open(double lo, double hi) { return {lo, hi, true, false}; }
    /// (lo, hi]
    static Interval left_open(double lo, double hi) { return {lo, hi, false, true}; }

    bool contains(double x) const {
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }
};

/// Finite nonnegative atomic measure on a bounded interval [0, M].
///
/// Atoms are kept sorted by location with strictly increasing locations;
/// atoms closer than the merge tolerance are combined and zero-mass atoms
/// are never stored. Values are immutable once built.
class Measure {
public:
    Measure() = default;

    /// Builds a measure from arbitrary (location, mass) pairs. Locations must
    /// lie in [0, bound]. An infinite bound only requires x >= 0.
    static Measure from_atoms(std::vector<Atom> atoms, double bound = kInf);

    static Measure dirac(double x, double mass = 1.0) { return from_atoms({{x, mass}}); }

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    double total_mass() const { return total_; }

    /// Mass of the atom at x (matched within the merge tolerance), 0 if none.
    double mass_at(double x) const;

    bool is_probability(double tol = kProbabilityTolerance) const;

    /// Copy with masses divided by their exact sum.
    Measure normalized() const;

    /// Nonnegative combination a*this + b*other on the union of supports.
    Measure combine(double a, const Measure& other, double b) const;

    friend bool operator==(const Measure&, const Measure&) = default;

private:
    std::vector<Atom> atoms_;
    double total_ = 0.0;
};

/// Locations within merge_tolerance(bound) of each other are identified.
double merge_tolerance(double bound);

Measure make_measure(std::vector<Atom> atoms, double bound = kInf);

/// u([0, x]).
double cdf(const Measure& u, double x);

/// Largest atom location m_u. Throws MeasureError on an empty measure.
double upper_support(const Measure& u);

Measure restrict(const Measure& u, const Interval& set);

/// True iff v_A - u_A is a nonnegative measure, i.e. u({x}) <= v({x}) + slack
/// at every atom location x in A.
bool is_component(const Measure& u, const Measure& v, const Interval& set, double slack = 1e-12);

/// True iff D_u(x) >= D_v(x) at every atom location (u is dominated by v).
/// Both inputs must be probability measures.
bool stoch_dominated(const Measure& u, const Measure& v, double slack = 1e-12);

/// h^a: mass on [a, m_h] collapsed onto a single atom at a; h itself if a > m_h.
Measure truncate_at(const Measure& h, double a);

double total_variation(const Measure& u, const Measure& v);

double kolmogorov_distance(const Measure& u, const Measure& v);

/// Kolmogorov distance with the supremum taken only over x in `window`.
double kolmogorov_distance(const Measure& u, const Measure& v, const Interval& window);

/// Levy distance between the distribution functions, bisected to 1e-9.
double levy_distance(const Measure& u, const Measure& v);

double mean(const Measure& u);

/// Sum of e^{t x_j} m_j. Throws std::overflow_error when t * m_u > 700.
double exp_moment(const Measure& u, double t);

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
};

/// Density proportional to x^k on [lo, hi], k > -1.
struct Power {
    double k = 0.0;
    double lo = 0.0;
    double hi = 1.0;
};

/// Density proportional to e^{-rate x} on [lo, hi].
struct TruncatedExponential {
    double rate = 1.0;
    double lo = 0.0;
    double hi = 1.0;
};

using FamilySpec = std::variant<Uniform, Power, TruncatedExponential>;

/// n atoms at cell midpoints carrying the exact CDF increment of each cell.
Measure discretize_family(const FamilySpec& family, int n, double bound = kInf);

/// One entry per location in the union of the supports of u and v.
struct AlignedAtom {
    double x;
    double mu;
    double mv;
};

std::vector<AlignedAtom> align(const Measure& u, const Measure& v);

}  // namespace selmut
