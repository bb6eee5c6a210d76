#include "freeprob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace freeprob {

double DensityGrid::value_at(double x) const {
    if (x <= lo || x >= hi) {
        if (x == lo) return values.front();
        if (x == hi) return values.back();
        return 0.0;
    }
    const double h = step();
    const double u = (x - lo) / h;
    std::size_t j = std::min<std::size_t>(std::size_t(u), size() - 2);
    const double frac = (x - node(j)) / h;
    return values[j] + frac * (values[j + 1] - values[j]);
}

GridSpec::GridSpec(double lo_, double hi_, int n) : lo(lo_), hi(hi_), n_points(n) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("GridSpec: requires finite lo < hi");
    if (n_points < 2)
        throw std::invalid_argument("GridSpec: requires n_points >= 2");
}

Measure Measure::make(std::vector<Atom> atoms, std::optional<DensityGrid> density,
                      bool normalize) {
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.x) || !std::isfinite(a.w))
            throw std::invalid_argument("Measure: non-finite atom");
        if (a.w < 0.0)
            throw std::invalid_argument("Measure: negative atom mass");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.x < b.x; });
    // merge duplicates, drop zero-mass atoms
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
        if (!merged.empty() && merged.back().x == a.x)
            merged.back().w += a.w;
        else
            merged.push_back(a);
    }
    std::erase_if(merged, [](const Atom& a) { return a.w == 0.0; });

    if (density) {
        DensityGrid& d = *density;
        if (!(d.lo < d.hi) || !std::isfinite(d.lo) || !std::isfinite(d.hi))
            throw std::invalid_argument("Measure: density requires lo < hi");
        if (d.values.size() < 2)
            throw std::invalid_argument("Measure: density requires >= 2 samples");
        for (double v : d.values) {
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("Measure: density samples must be finite and >= 0");
        }
        // trim all-zero margins, keeping one zero node next to the support
        std::size_t first = 0, last = d.values.size() - 1;
        while (first < last && d.values[first] == 0.0 && d.values[first + 1] == 0.0) ++first;
        while (last > first && d.values[last] == 0.0 && d.values[last - 1] == 0.0) --last;
        if (first == last || std::all_of(d.values.begin(), d.values.end(),
                                         [](double v) { return v == 0.0; })) {
            density.reset();
        } else if (first > 0 || last + 1 < d.values.size()) {
            const double h = d.step();
            DensityGrid t;
            t.lo = d.lo + h * double(first);
            t.hi = d.lo + h * double(last);
            t.values.assign(d.values.begin() + long(first), d.values.begin() + long(last) + 1);
            density = std::move(t);
        }
    }

    Measure m;
    m.atoms_ = std::move(merged);
    m.density_ = std::move(density);
    m.rebuild_cache();

    if (normalize) {
        if (m.total_mass_ <= 0.0)
            throw std::invalid_argument("Measure: probability measure needs positive mass");
        const double s = 1.0 / m.total_mass_;
        for (Atom& a : m.atoms_) a.w *= s;
        if (m.density_)
            for (double& v : m.density_->values) v *= s;
        m.rebuild_cache();
    }
    return m;
}

Measure Measure::probability(std::vector<Atom> atoms, std::optional<DensityGrid> density) {
    return make(std::move(atoms), std::move(density), true);
}

Measure Measure::finite(std::vector<Atom> atoms, std::optional<DensityGrid> density) {
    return make(std::move(atoms), std::move(density), false);
}

void Measure::rebuild_cache() {
    double mass = 0.0;
    atom_cum_.resize(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        mass += atoms_[i].w;
        atom_cum_[i] = mass;
    }
    density_cum_.clear();
    if (density_) {
        const auto& d = *density_;
        const double h = d.step();
        density_cum_.resize(d.size());
        density_cum_[0] = 0.0;
        for (std::size_t i = 1; i < d.size(); ++i)
            density_cum_[i] = density_cum_[i - 1] + 0.5 * h * (d.values[i - 1] + d.values[i]);
        mass += density_cum_.back();
    }
    total_mass_ = mass;
}

double Measure::density_integral_up_to(double x) const {
    if (!density_) return 0.0;
    const auto& d = *density_;
    if (x <= d.lo) return 0.0;
    if (x >= d.hi) return density_cum_.back();
    const double h = d.step();
    std::size_t j = std::min<std::size_t>(std::size_t((x - d.lo) / h), d.size() - 2);
    if (d.node(j) > x && j > 0) --j;
    const double t = x - d.node(j);
    const double slope = (d.values[j + 1] - d.values[j]) / h;
    return density_cum_[j] + d.values[j] * t + 0.5 * slope * t * t;
}

double Measure::cdf(double x) const {
    double acc = density_integral_up_to(x);
    // atoms with location <= x (prefix sums, binary search)
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                     [](double v, const Atom& a) { return v < a.x; });
    if (it != atoms_.begin()) acc += atom_cum_[std::size_t(it - atoms_.begin()) - 1];
    return acc;
}

double Measure::atom_mass_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.x < v; });
    return (it != atoms_.end() && it->x == x) ? it->w : 0.0;
}

double Measure::tail_mass(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("tail_mass: eps must be > 0");
    // mass{t <= -eps} + mass{t >= eps}, boundary atoms included
    return cdf(-eps) + (total_mass_ - cdf_left(eps));
}

std::vector<QuadratureNode> Measure::quadrature_nodes(std::span<const double> split_at) const {
    std::vector<QuadratureNode> nodes;
    nodes.reserve(atoms_.size() + (density_ ? density_->size() + 2 * split_at.size() : 0));
    for (const Atom& a : atoms_) nodes.push_back({a.x, a.w});
    if (density_) {
        const auto& d = *density_;
        const double h = d.step();
        for (std::size_t j = 0; j + 1 < d.size(); ++j) {
            const double p = d.node(j), q = d.node(j + 1);
            // collect subdivision points inside this cell
            double cuts[8];
            int nc = 0;
            for (double s : split_at)
                if (s > p && s < q && nc < 8) cuts[nc++] = s;
            std::sort(cuts, cuts + nc);
            double left = p;
            double vleft = d.values[j];
            const double slope = (d.values[j + 1] - d.values[j]) / h;
            for (int k = 0; k <= nc; ++k) {
                const double right = (k == nc) ? q : cuts[k];
                const double vright = (k == nc) ? d.values[j + 1]
                                                : d.values[j] + slope * (right - p);
                const double half = 0.5 * (right - left);
                nodes.push_back({left, half * vleft});
                nodes.push_back({right, half * vright});
                left = right;
                vleft = vright;
            }
        }
    }
    return nodes;
}

Measure Measure::shifted(double a) const {
    if (!std::isfinite(a)) throw std::invalid_argument("shift: non-finite offset");
    Measure m(*this);
    for (Atom& at : m.atoms_) at.x += a;
    if (m.density_) {
        m.density_->lo += a;
        m.density_->hi += a;
    }
    // masses do not change; keep the cached total bit-for-bit
    return m;
}

Measure Measure::dilated(double s) const {
    if (s == 0.0 || !std::isfinite(s)) throw std::invalid_argument("dilate: scale must be nonzero");
    std::vector<Atom> atoms = atoms_;
    for (Atom& a : atoms) a.x *= s;
    std::optional<DensityGrid> density;
    if (density_) {
        DensityGrid d;
        const double as = std::abs(s);
        d.values.resize(density_->size());
        if (s > 0) {
            d.lo = density_->lo * s;
            d.hi = density_->hi * s;
            for (std::size_t i = 0; i < d.values.size(); ++i)
                d.values[i] = density_->values[i] / as;
        } else {
            d.lo = density_->hi * s;
            d.hi = density_->lo * s;
            for (std::size_t i = 0; i < d.values.size(); ++i)
                d.values[i] = density_->values[d.values.size() - 1 - i] / as;
        }
        density = std::move(d);
    }
    return make(std::move(atoms), std::move(density), false);
}

double Measure::mean() const {
    return integrate([](double t) { return t; });
}

double Measure::variance() const {
    const double m = mean() / (total_mass_ > 0 ? total_mass_ : 1.0);
    return integrate([m](double t) { return (t - m) * (t - m); });
}

double Measure::support_lo() const {
    double lo = std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) lo = atoms_.front().x;
    if (density_) lo = std::min(lo, density_->lo);
    return lo;
}

double Measure::support_hi() const {
    double hi = -std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) hi = atoms_.back().x;
    if (density_) hi = std::max(hi, density_->hi);
    return hi;
}

Measure superpose(std::span<const Measure> parts) {
    std::vector<Atom> atoms;
    std::vector<const DensityGrid*> dens;
    for (const Measure& m : parts) {
        atoms.insert(atoms.end(), m.atoms().begin(), m.atoms().end());
        if (m.density()) dens.push_back(&*m.density());
    }
    std::optional<DensityGrid> density;
    if (!dens.empty()) {
        bool same_grid = std::all_of(dens.begin(), dens.end(), [&](const DensityGrid* d) {
            return d->lo == dens[0]->lo && d->hi == dens[0]->hi && d->size() == dens[0]->size();
        });
        DensityGrid out;
        if (same_grid) {
            out = *dens[0];
            for (std::size_t k = 1; k < dens.size(); ++k)
                for (std::size_t i = 0; i < out.size(); ++i)
                    out.values[i] += dens[k]->values[i];
        } else {
            double lo = dens[0]->lo, hi = dens[0]->hi, hmin = dens[0]->step();
            double target_mass = 0.0;
            for (const DensityGrid* d : dens) {
                lo = std::min(lo, d->lo);
                hi = std::max(hi, d->hi);
                hmin = std::min(hmin, d->step());
                double m = 0.0;
                for (std::size_t i = 0; i + 1 < d->size(); ++i)
                    m += 0.5 * d->step() * (d->values[i] + d->values[i + 1]);
                target_mass += m;
            }
            std::size_t n = std::min<std::size_t>(8192, std::size_t((hi - lo) / hmin) + 2);
            n = std::max<std::size_t>(n, 2);
            out.lo = lo;
            out.hi = hi;
            out.values.assign(n, 0.0);
            double resampled = 0.0;
            const double h = (hi - lo) / double(n - 1);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = lo + h * double(i);
                for (const DensityGrid* d : dens) out.values[i] += d->value_at(x);
                resampled += out.values[i] * ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * h;
            }
            // rescale so resampling onto the common grid conserves mass
            if (resampled > 0.0 && target_mass > 0.0) {
                const double s = target_mass / resampled;
                for (double& v : out.values) v *= s;
            }
        }
        density = std::move(out);
    }
    return Measure::finite(std::move(atoms), std::move(density));
}

Measure reweight(const Measure& m, const std::function<double(double)>& weight) {
    std::vector<Atom> atoms;
    for (const Atom& a : m.atoms()) {
        const double w = weight(a.x);
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("reweight: weight must be finite and >= 0");
        atoms.push_back({a.x, a.w * w});
    }
    std::optional<DensityGrid> density;
    if (m.density()) {
        DensityGrid d = *m.density();
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double w = weight(d.node(i));
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("reweight: weight must be finite and >= 0");
            d.values[i] *= w;
        }
        density = std::move(d);
    }
    return Measure::finite(std::move(atoms), std::move(density));
}

namespace {

// CDF kink locations: atoms and density nodes.
std::vector<double> kinks(const Measure& m) {
    std::vector<double> k;
    for (const Atom& a : m.atoms()) k.push_back(a.x);
    if (m.density()) {
        const auto& d = *m.density();
        for (std::size_t i = 0; i < d.size(); ++i) k.push_back(d.node(i));
    }
    return k;
}

// max over x of F_b(x) - F_a(x + eps) - eps, evaluated at candidate kinks
// and their left limits (the sup of this piecewise-linear-with-jumps
// expression is attained there).
double band_violation(const Measure& a, const Measure& b, double eps,
                      const std::vector<double>& ka, const std::vector<double>& kb) {
    double worst = -std::numeric_limits<double>::infinity();
    auto consider = [&](double x) {
        worst = std::max(worst, b.cdf(x) - a.cdf(x + eps) - eps);
        worst = std::max(worst, b.cdf_left(x) - a.cdf_left(x + eps) - eps);
    };
    for (double x : kb) consider(x);
    for (double x : ka) consider(x - eps);
    return worst;
}

} // namespace

double levy_distance(const Measure& a, const Measure& b) {
    const std::vector<double> ka = kinks(a), kb = kinks(b);
    const double slack = 1e-15 * (1.0 + a.total_mass() + b.total_mass());
    auto feasible = [&](double eps) {
        return band_violation(a, b, eps, ka, kb) <= slack &&
               band_violation(b, a, eps, kb, ka) <= slack;
    };
    if (feasible(0.0)) return 0.0;
    double hi = 1.0;
    int grow = 0;
    while (!feasible(hi)) {
        hi *= 2.0;
        if (++grow > 12) throw numeric_error("levy_distance: no feasible band width");
    }
    double lo = 0.0;
    for (int i = 0; i < 60 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

double kolmogorov_distance(const Measure& a, const Measure& b) {
    std::vector<double> xs = kinks(a);
    {
        std::vector<double> kb = kinks(b);
        xs.insert(xs.end(), kb.begin(), kb.end());
    }
    double worst = 0.0;
    for (double x : xs) {
        worst = std::max(worst, std::abs(a.cdf(x) - b.cdf(x)));
        worst = std::max(worst, std::abs(a.cdf_left(x) - b.cdf_left(x)));
    }
    return worst;
}

} // namespace freeprob
