#include "freeprob/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freeprob {

namespace {

std::string complex_str(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

void require_upper(Complex z, const char* who) {
    if (!(z.imag() > 0.0))
        throw std::domain_error(std::string(who) + ": requires Im z > 0, got z = " + complex_str(z));
}

// Accumulate the density contribution to G and (optionally) G'.
// Per cell [p,q] with linear density a + b*t:
//   int (a+bt)/(z-t)   dt = (a+bz) L - b (q-p),   L = log(z-p) - log(z-q)
//   int (a+bt)/(z-t)^2 dt = (a+bz) (q-p)/((z-p)(z-q)) - b L
// and G' = -int 1/(z-t)^2 dmu. Far from the cell the log difference
// cancels catastrophically, so a Laurent series around the cell center
// takes over (it is also cheaper).
void density_cauchy(const DensityGrid& d, Complex z, Complex& g, Complex* gp) {
    const double h = d.step();
    const std::size_t n = d.size();
    const double far2 = (25.0 * h) * (25.0 * h);
    Complex sg = 0.0, sgp = 0.0;
    bool have_log = false;
    Complex log_next = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double vp = d.values[j], vq = d.values[j + 1];
        if (vp == 0.0 && vq == 0.0) {
            have_log = false;
            continue;
        }
        const double p = d.node(j);
        const double q = (j + 2 == n) ? d.hi : d.node(j + 1);
        const double mid = 0.5 * (p + q), half = 0.5 * (q - p);
        const Complex zm = z - mid;
        if (std::norm(zm) > far2) {
            have_log = false;
            const double vm = 0.5 * (vp + vq);
            const double b = (vq - vp) / h;
            const Complex zeta = 1.0 / zm;
            const Complex x = half * zeta;
            const Complex x2 = x * x;
            const Complex even = 1.0 + x2 * (1.0 / 3.0 + x2 * (0.2 + x2 / 7.0));
            const Complex odd = x2 * (1.0 / 3.0 + x2 * (0.2 + x2 / 7.0));
            sg += 2.0 * half * (vm * zeta * even + b * odd);
            if (gp) {
                const Complex geom = 1.0 + x2 * (1.0 + x2 * (1.0 + x2));
                const Complex kterm = 2.0 * vm * half * zeta * zeta * geom +
                                      2.0 * b * x * x2 * (2.0 / 3.0 + x2 * (0.8 + x2 * 6.0 / 7.0));
                sgp += kterm;
            }
            continue;
        }
        const Complex log_p = have_log ? log_next : std::log(z - p);
        log_next = std::log(z - q);
        have_log = true;
        const Complex inv_p = 1.0 / (z - p), inv_q = 1.0 / (z - q);
        const double b = (vq - vp) / h;
        const double a = vp - b * p;
        const Complex L = log_p - log_next;
        const Complex abz = a + b * z;
        sg += abz * L - b * (q - p);
        if (gp) sgp += abz * (q - p) * inv_p * inv_q - b * L;
    }
    g += sg;
    if (gp) *gp += -sgp;
}

struct NewtonOpts {
    double tol_rel = 1e-13;
    double accept_rel = 1e-10;
    int max_iter = 80;
};

// Newton for F(z) = w on C+. Returns the iterate if the residual meets
// accept_rel, nullopt otherwise.
std::optional<Complex> newton_invert(const Measure& m, Complex w, Complex seed,
                                     const NewtonOpts& opts = {}) {
    Complex z = seed;
    if (!(z.imag() > 0)) return std::nullopt;
    const double scale = 1.0 + std::abs(w);
    Complex best = z;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iter; ++it) {
        const auto [g, gp] = cauchy_pair(m, z);
        if (g == Complex(0.0)) return std::nullopt;
        const Complex f = 1.0 / g;
        const Complex r = f - w;
        const double res = std::abs(r);
        if (res < best_res) {
            best_res = res;
            best = z;
        }
        if (res <= opts.tol_rel * scale) return z;
        const Complex fp = -gp / (g * g);
        if (std::abs(fp) < 1e-300) break;
        Complex step = r / fp;
        // keep the iterate in the upper half-plane
        int halvings = 0;
        while ((z - step).imag() <= 0.0 && halvings++ < 48) step *= 0.5;
        if ((z - step).imag() <= 0.0) break;
        z -= step;
        if (std::abs(z) > 1e9 * scale) break;
    }
    if (best_res <= opts.accept_rel * scale) return best;
    return std::nullopt;
}

} // namespace

Complex cauchy(const Measure& m, Complex z) {
    require_upper(z, "cauchy");
    Complex g = 0.0;
    for (const Atom& a : m.atoms()) g += a.w / (z - a.x);
    if (m.density()) density_cauchy(*m.density(), z, g, nullptr);
    return g;
}

Complex cauchy_derivative(const Measure& m, Complex z) {
    require_upper(z, "cauchy_derivative");
    Complex gp = 0.0;
    for (const Atom& a : m.atoms()) {
        const Complex d = z - a.x;
        gp -= a.w / (d * d);
    }
    if (m.density()) {
        Complex g = 0.0;
        density_cauchy(*m.density(), z, g, &gp);
    }
    return gp;
}

std::pair<Complex, Complex> cauchy_pair(const Measure& m, Complex z) {
    require_upper(z, "cauchy");
    Complex g = 0.0, gp = 0.0;
    for (const Atom& a : m.atoms()) {
        const Complex inv = 1.0 / (z - a.x);
        g += a.w * inv;
        gp -= a.w * inv * inv;
    }
    if (m.density()) density_cauchy(*m.density(), z, g, &gp);
    return {g, gp};
}

Complex f_transform(const Measure& m, Complex z) {
    return 1.0 / cauchy(m, z);
}

CauchyEvaluable cauchy_evaluable(const Measure& m) {
    return [m](Complex z) { return cauchy(m, z); };
}

Complex invert_f(const Measure& m, Complex w, double beta_hint) {
    require_upper(w, "invert_f");
    if (m.is_point_mass()) return w + m.atoms().front().x; // F(z) = z - c exactly
    if (auto z = newton_invert(m, w, w)) return *z;

    // continuation from a high anchor down to w
    const double y_top = std::max(4.0 * std::max(beta_hint, 1.0), 2.0 * std::abs(w));
    const Complex anchor(0.0, y_top);
    auto cur = newton_invert(m, anchor, anchor);
    if (!cur)
        throw numeric_error("invert_f: cannot invert at anchor " + complex_str(anchor));
    double s = 0.0, ds = 0.25;
    while (s < 1.0) {
        const double s_next = std::min(1.0, s + ds);
        const Complex target = (1.0 - s_next) * anchor + s_next * w;
        if (auto z = newton_invert(m, target, *cur)) {
            cur = z;
            s = s_next;
            ds = std::min(0.25, ds * 2.0);
        } else {
            ds *= 0.5;
            if (ds < 1e-4)
                throw numeric_error("invert_f: outside invertibility region at w = " +
                                    complex_str(w));
        }
    }
    return *cur;
}

Complex voiculescu(const Measure& m, Complex w, double beta_hint) {
    return invert_f(m, w, beta_hint) - w;
}

Cone select_cone(std::span<const Measure> ms, double alpha) {
    if (ms.empty()) throw std::invalid_argument("select_cone: empty measure list");
    if (!(alpha > 0.0)) throw std::invalid_argument("select_cone: alpha must be > 0");

    constexpr double slopes[] = {-0.875, -0.625, -0.375, -0.125, 0.125, 0.375, 0.625, 0.875};
    constexpr double heights[] = {1.05, 1.5, 2.2, 3.2, 4.6, 6.8, 10.0, 15.0};
    constexpr double beta_cap = 1024.0;

    for (double beta = 1.0; beta <= beta_cap; beta *= 2.0) {
        bool ok = true;
        for (const Measure& m : ms) {
            std::vector<Complex> sols;
            sols.reserve(64);
            for (double f : slopes) {
                double prev_im = 0.0;
                for (double hy : heights) {
                    const double y = beta * hy;
                    const Complex w(f * alpha * y, y);
                    Complex z;
                    try {
                        z = invert_f(m, w, beta);
                    } catch (const numeric_error&) {
                        ok = false;
                        break;
                    }
                    if (!(z.imag() > prev_im)) { // Im F^{-1} must climb along the ray
                        ok = false;
                        break;
                    }
                    prev_im = z.imag();
                    sols.push_back(z);
                }
                if (!ok) break;
            }
            if (ok) { // probe solutions must be pairwise distinct
                for (std::size_t i = 0; i < sols.size() && ok; ++i)
                    for (std::size_t j = i + 1; j < sols.size(); ++j)
                        if (std::abs(sols[i] - sols[j]) <= 1e-9 * (1.0 + std::abs(sols[i]))) {
                            ok = false;
                            break;
                        }
            }
            if (!ok) break;
        }
        if (ok) return Cone{alpha, beta};
    }
    throw numeric_error("select_cone: cone selection failed (no beta <= 1024 for alpha = " +
                        std::to_string(alpha) + ")");
}

Complex prop23_residual(const Measure& m, Complex w, double beta_hint) {
    require_upper(w, "prop23_residual");
    const Complex denom = w * w * (cauchy(m, w) - 1.0 / w);
    if (std::abs(denom) < 1e-14)
        throw numeric_error("prop23_residual: degenerate residual at w = " + complex_str(w));
    return voiculescu(m, w, beta_hint) / denom - 1.0;
}

Measure stieltjes_invert(const CauchyEvaluable& g, const GridSpec& grid, double eps,
                         double atom_threshold) {
    if (!(eps > 0.0)) throw std::invalid_argument("stieltjes_invert: eps must be > 0");

    // light sanity probe of the evaluator
    {
        const Complex z0(0.5 * (grid.lo + grid.hi), std::max(1.0, 8.0 * eps));
        const Complex v = g(z0);
        if (!(v.imag() < 0.0) || std::abs(v) > 1.0 / z0.imag() + 1e-6)
            throw std::domain_error("stieltjes_invert: evaluator violates Cauchy-transform bounds");
    }

    const int n = grid.n_points;
    const double h = grid.step();
    std::vector<Complex> g_eps(n), g_half(n);
    for (int j = 0; j < n; ++j) {
        const double x = grid.node(j);
        g_eps[j] = g(Complex(x, eps));
        g_half[j] = g(Complex(x, 0.5 * eps));
    }

    // atom detection: clusters of nodes where eps*|G| is large
    std::vector<Atom> atoms;
    int j = 0;
    while (j < n) {
        if (eps * std::abs(g_eps[j]) <= atom_threshold) {
            ++j;
            continue;
        }
        int j0 = j;
        while (j < n && eps * std::abs(g_eps[j]) > atom_threshold) ++j;
        double lo = grid.node(j0) - h, hi = grid.node(j - 1) + h;
        lo = std::max(lo, grid.lo);
        hi = std::min(hi, grid.hi);
        // locate the peak of |G| at the lower evaluation height
        double a = lo, b = hi;
        for (int it = 0; it < 80 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
            const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
            if (std::abs(g(Complex(m1, 0.5 * eps))) < std::abs(g(Complex(m2, 0.5 * eps))))
                a = m1;
            else
                b = m2;
        }
        const double loc = 0.5 * (a + b);
        const double m_e = -eps * g(Complex(loc, eps)).imag();
        const double m_h = -0.5 * eps * g(Complex(loc, 0.5 * eps)).imag();
        const double mass = 2.0 * m_h - m_e; // Richardson in eps
        if (mass > 1e-6) atoms.push_back({loc, mass});
    }

    // density: Richardson-extrapolated Poisson data with atom transforms removed
    DensityGrid dens;
    dens.lo = grid.lo;
    dens.hi = grid.hi;
    dens.values.resize(n);
    for (int k = 0; k < n; ++k) {
        const double x = grid.node(k);
        Complex ge = g_eps[k], gh = g_half[k];
        for (const Atom& a : atoms) {
            ge -= a.w / (Complex(x, eps) - a.x);
            gh -= a.w / (Complex(x, 0.5 * eps) - a.x);
        }
        const double v = -(2.0 * gh.imag() - ge.imag()) / M_PI;
        // clamp negatives and flush extrapolation noise so the support
        // stays trimmable
        dens.values[k] = (v < 1e-9) ? 0.0 : v;
    }

    Measure raw = Measure::finite(atoms, std::move(dens));
    const double mass = raw.total_mass();
    if (std::abs(mass - 1.0) > 0.02) {
        std::ostringstream os;
        os << "stieltjes_invert: inversion mass defect (recovered mass " << mass << ")";
        throw numeric_error(os.str());
    }
    std::optional<DensityGrid> d = raw.density();
    return Measure::probability(raw.atoms(), std::move(d));
}

} // namespace freeprob
