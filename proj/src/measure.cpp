#include "selmut/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace selmut {

namespace {

double extent(const Measure& u) { return u.empty() ? 0.0 : u.atoms().back().x; }

double pair_tolerance(const Measure& u, const Measure& v) {
    return merge_tolerance(std::max(extent(u), extent(v)));
}

double check_probability(const Measure& u, const char* what) {
    if (!u.is_probability()) {
        throw MeasureError(std::string(what) + ": expected a probability measure, total mass " +
                           std::to_string(u.total_mass()));
    }
    return u.total_mass();
}

}  // namespace

double merge_tolerance(double bound) {
    if (!std::isfinite(bound)) bound = 1.0;
    return 1e-12 * std::max(1.0, bound);
}

Measure Measure::from_atoms(std::vector<Atom> atoms, double bound) {
    double top = 0.0;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.x) || a.x < 0.0 || a.x > bound) {
            throw MeasureError("atom location " + std::to_string(a.x) + " outside [0, " +
                               std::to_string(bound) + "]");
        }
        if (!std::isfinite(a.m) || a.m < 0.0) {
            throw MeasureError("negative or non-finite atom mass " + std::to_string(a.m));
        }
        top = std::max(top, a.x);
    }
    const double tol = merge_tolerance(std::isfinite(bound) ? bound : top);

    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& l, const Atom& r) { return l.x < r.x; });

    Measure out;
    out.atoms_.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!out.atoms_.empty() && a.x - out.atoms_.back().x <= tol) {
            out.atoms_.back().m += a.m;
        } else {
            out.atoms_.push_back(a);
        }
    }
    std::erase_if(out.atoms_, [](const Atom& a) { return a.m == 0.0; });
    for (const auto& a : out.atoms_) out.total_ += a.m;
    return out;
}

Measure make_measure(std::vector<Atom> atoms, double bound) {
    return Measure::from_atoms(std::move(atoms), bound);
}

double Measure::mass_at(double x) const {
    const double tol = merge_tolerance(std::max(x, extent(*this)));
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x - tol,
                               [](const Atom& a, double v) { return a.x < v; });
    if (it != atoms_.end() && std::abs(it->x - x) <= tol) return it->m;
    return 0.0;
}

bool Measure::is_probability(double tol) const { return std::abs(total_ - 1.0) <= tol; }

Measure Measure::normalized() const {
    if (total_ <= 0.0) throw MeasureError("cannot normalize a measure with zero total mass");
    Measure out = *this;
    double sum = 0.0;
    for (auto& a : out.atoms_) {
        a.m /= total_;
        sum += a.m;
    }
    out.total_ = sum;
    return out;
}

Measure Measure::combine(double a, const Measure& other, double b) const {
    if (!(a >= 0.0) || !(b >= 0.0)) throw MeasureError("combine: coefficients must be nonnegative");
    std::vector<Atom> atoms;
    for (const auto& e : align(*this, other)) atoms.push_back({e.x, a * e.mu + b * e.mv});
    return from_atoms(std::move(atoms));
}

std::vector<AlignedAtom> align(const Measure& u, const Measure& v) {
    const double tol = pair_tolerance(u, v);
    const auto ua = u.atoms();
    const auto va = v.atoms();
    std::vector<AlignedAtom> out;
    out.reserve(ua.size() + va.size());
    std::size_t i = 0, j = 0;
    while (i < ua.size() || j < va.size()) {
        if (j == va.size() || (i < ua.size() && ua[i].x < va[j].x - tol)) {
            out.push_back({ua[i].x, ua[i].m, 0.0});
            ++i;
        } else if (i == ua.size() || va[j].x < ua[i].x - tol) {
            out.push_back({va[j].x, 0.0, va[j].m});
            ++j;
        } else {
            out.push_back({ua[i].x, ua[i].m, va[j].m});
            ++i;
            ++j;
        }
    }
    return out;
}

double cdf(const Measure& u, double x) {
    double acc = 0.0;
    for (const auto& a : u.atoms()) {
        if (a.x > x) break;
        acc += a.m;
    }
    return acc;
}

double upper_support(const Measure& u) {
    if (u.empty()) throw MeasureError("upper_support of an empty measure");
    return u.atoms().back().x;
}

Measure restrict(const Measure& u, const Interval& set) {
    std::vector<Atom> kept;
    for (const auto& a : u.atoms()) {
        if (set.contains(a.x)) kept.push_back(a);
    }
    return Measure::from_atoms(std::move(kept));
}

bool is_component(const Measure& u, const Measure& v, const Interval& set, double slack) {
    for (const auto& e : align(u, v)) {
        if (set.contains(e.x) && e.mu > e.mv + slack) return false;
    }
    return true;
}

bool stoch_dominated(const Measure& u, const Measure& v, double slack) {
    check_probability(u, "stoch_dominated");
    check_probability(v, "stoch_dominated");
    double du = 0.0, dv = 0.0;
    for (const auto& e : align(u, v)) {
        du += e.mu;
        dv += e.mv;
        if (du + slack < dv) return false;
    }
    return true;
}

Measure truncate_at(const Measure& h, double a) {
    if (!(a >= 0.0)) throw MeasureError("truncate_at: a must be nonnegative");
    if (h.empty() || a > upper_support(h)) return h;
    std::vector<Atom> atoms;
    double collapsed = 0.0;
    for (const auto& at : h.atoms()) {
        if (at.x < a) {
            atoms.push_back(at);
        } else {
            collapsed += at.m;
        }
    }
    atoms.push_back({a, collapsed});
    return Measure::from_atoms(std::move(atoms));
}

double total_variation(const Measure& u, const Measure& v) {
    double acc = 0.0;
    for (const auto& e : align(u, v)) acc += std::abs(e.mu - e.mv);
    return 0.5 * acc;
}

double kolmogorov_distance(const Measure& u, const Measure& v) {
    return kolmogorov_distance(u, v, Interval::closed(-kInf, kInf));
}

double kolmogorov_distance(const Measure& u, const Measure& v, const Interval& window) {
    double du = 0.0, dv = 0.0, sup = 0.0;
    for (const auto& e : align(u, v)) {
        du += e.mu;
        dv += e.mv;
        if (window.contains(e.x)) sup = std::max(sup, std::abs(du - dv));
    }
    return sup;
}

namespace {

// Right-continuous step CDF with O(log n) evaluation.
class StepCdf {
public:
    explicit StepCdf(const Measure& u) {
        double acc = 0.0;
        for (const auto& a : u.atoms()) {
            acc += a.m;
            xs_.push_back(a.x);
            cum_.push_back(acc);
        }
    }

    double operator()(double x) const {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        if (it == xs_.begin()) return 0.0;
        return cum_[static_cast<std::size_t>(it - xs_.begin()) - 1];
    }

    // D(x_k) for the k-th jump location, avoiding re-evaluation at a shifted x.
    double at_jump(std::size_t k) const { return cum_[k]; }
    const std::vector<double>& jumps() const { return xs_; }

private:
    std::vector<double> xs_;
    std::vector<double> cum_;
};

// Both sides are right-continuous step functions, so the band inequalities
// only need checking at the jump points of either side.
bool within_levy_band(const StepCdf& du, const StepCdf& dv, double eps) {
    const auto& ux = du.jumps();
    const auto& vx = dv.jumps();
    // D_u(x - eps) - eps <= D_v(x)
    for (std::size_t k = 0; k < ux.size(); ++k) {
        if (du.at_jump(k) - eps > dv(ux[k] + eps)) return false;
    }
    for (std::size_t k = 0; k < vx.size(); ++k) {
        if (du(vx[k] - eps) - eps > dv.at_jump(k)) return false;
    }
    // D_v(x) <= D_u(x + eps) + eps
    for (std::size_t k = 0; k < vx.size(); ++k) {
        if (dv.at_jump(k) > du(vx[k] + eps) + eps) return false;
    }
    for (std::size_t k = 0; k < ux.size(); ++k) {
        if (dv(ux[k] - eps) > du.at_jump(k) + eps) return false;
    }
    return true;
}

}  // namespace

double levy_distance(const Measure& u, const Measure& v) {
    const StepCdf du(u), dv(v);
    if (within_levy_band(du, dv, 0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (within_levy_band(du, dv, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double mean(const Measure& u) {
    double acc = 0.0;
    for (const auto& a : u.atoms()) acc += a.x * a.m;
    return acc;
}

double exp_moment(const Measure& u, double t) {
    if (u.empty()) return 0.0;
    if (t * upper_support(u) > 700.0) {
        throw std::overflow_error("exp_moment: t * m_u exceeds 700");
    }
    double acc = 0.0;
    for (const auto& a : u.atoms()) acc += std::exp(t * a.x) * a.m;
    return acc;
}

namespace {

void check_range(double lo, double hi, double bound) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || !(lo < hi)) {
        throw MeasureError("family range must satisfy 0 <= lo < hi");
    }
    if (hi > bound) throw MeasureError("family upper end exceeds the bound M");
}

}  // namespace

Measure discretize_family(const FamilySpec& family, int n, double bound) {
    if (n < 1) throw MeasureError("discretize_family: n must be >= 1");

    double lo = 0.0, hi = 0.0;
    // F(lo) = 0, F(hi) = 1
    std::function<double(double)> cdf_fn;

    if (const auto* f = std::get_if<Uniform>(&family)) {
        lo = f->lo;
        hi = f->hi;
        check_range(lo, hi, bound);
        cdf_fn = [lo, hi](double x) { return (x - lo) / (hi - lo); };
    } else if (const auto* f = std::get_if<Power>(&family)) {
        lo = f->lo;
        hi = f->hi;
        check_range(lo, hi, bound);
        if (!std::isfinite(f->k) || f->k <= -1.0) throw MeasureError("power family needs k > -1");
        const double e = f->k + 1.0;
        const double base = std::pow(lo, e);
        const double span = std::pow(hi, e) - base;
        cdf_fn = [e, base, span](double x) { return (std::pow(x, e) - base) / span; };
    } else if (const auto* f = std::get_if<TruncatedExponential>(&family)) {
        lo = f->lo;
        hi = f->hi;
        check_range(lo, hi, bound);
        if (!std::isfinite(f->rate)) throw MeasureError("exponential family needs a finite rate");
        const double r = f->rate;
        if (r == 0.0) {
            cdf_fn = [lo, hi](double x) { return (x - lo) / (hi - lo); };
        } else {
            const double denom = std::expm1(-r * (hi - lo));
            cdf_fn = [r, lo, denom](double x) { return std::expm1(-r * (x - lo)) / denom; };
        }
    }

    const double width = (hi - lo) / n;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(n));
    double prev = 0.0;
    for (int j = 0; j < n; ++j) {
        const double right = (j + 1 == n) ? 1.0 : cdf_fn(lo + (j + 1) * width);
        atoms.push_back({lo + (j + 0.5) * width, right - prev});
        prev = right;
    }
    return Measure::from_atoms(std::move(atoms), bound);
}

}  // namespace selmut
