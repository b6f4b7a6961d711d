#include "replab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include <mpfr.h>

#include "replab/errors.hpp"

namespace replab {

namespace {

struct Vec2 {
    double d;
    double dt;
};

struct Mat2 {
    double a11, a12, a21, a22;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    double det() const { return a11 * a22 - a12 * a21; }
};

double sup_norm(const PlanePoint& x) { return std::max(std::abs(x.d), std::abs(x.dt)); }

double sup_dist(const PlanePoint& x, const PlanePoint& y) {
    return std::max(std::abs(x.d - y.d), std::abs(x.dt - y.dt));
}

bool close(const PlanePoint& x, const PlanePoint& y, double tol) {
    return sup_dist(x, y) <= tol * (1.0 + sup_norm(y));
}

// sum_k c_k v^k and sum_k k c_k v^(k-1), Horner form.
template <typename T>
T poly(const std::vector<double>& c, const T& v) {
    T acc = T(0);
    for (std::size_t k = c.size(); k-- > 0;)
        acc = (acc + c[k]) * v;
    return acc;
}

double poly_derivative(const std::vector<double>& c, double v) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;)
        acc = acc * v + static_cast<double>(k + 1) * c[k];
    return acc;
}

Mat2 jac(const AlgebraParams& p, const PlanePoint& x) {
    return {poly_derivative(p.gamma(), x.d), poly_derivative(p.beta(), x.dt), 1.0, 0.0};
}

Mat2 inverse_jac(const AlgebraParams& p, const PlanePoint& y) {
    const double b = p.beta_k(1);
    return {0.0, 1.0, 1.0 / b, -poly_derivative(p.gamma(), y.dt) / b};
}

bool diverged(const PlanePoint& x) {
    return !(std::abs(x.d) <= tolerances::divergence && std::abs(x.dt) <= tolerances::divergence);
}

// Residual value and Jacobian; nullopt when an iterate leaves the divergence guard.
struct Evaluation {
    Vec2 value;
    Mat2 jacobian;
};

std::optional<Evaluation> return_map_residual(const AlgebraParams& p, const PlanePoint& x,
                                              std::size_t period) {
    Mat2 J = Mat2::identity();
    PlanePoint y = x;
    for (std::size_t i = 0; i < period; ++i) {
        J = jac(p, y) * J;
        y = {p.alpha() + poly(p.beta(), y.dt) + poly(p.gamma(), y.d), y.d};
        if (diverged(y))
            return std::nullopt;
    }
    return Evaluation{{y.d - x.d, y.dt - x.dt}, J - Mat2::identity()};
}

// s^k(x) - s^-(N-k)(x); its zeros are exactly the period-N points when s is invertible,
// and each factor only expands by the square root of the full return map.
std::optional<Evaluation> balanced_residual(const AlgebraParams& p, const PlanePoint& x,
                                            std::size_t period) {
    const std::size_t forward = (period + 1) / 2;
    const std::size_t backward = period - forward;
    Mat2 Jf = Mat2::identity();
    PlanePoint y = x;
    for (std::size_t i = 0; i < forward; ++i) {
        Jf = jac(p, y) * Jf;
        y = {p.alpha() + poly(p.beta(), y.dt) + poly(p.gamma(), y.d), y.d};
        if (diverged(y))
            return std::nullopt;
    }
    Mat2 Jb = Mat2::identity();
    PlanePoint z = x;
    const double b = p.beta_k(1);
    for (std::size_t i = 0; i < backward; ++i) {
        Jb = inverse_jac(p, z) * Jb;
        z = {z.dt, (z.d - p.alpha() - poly(p.gamma(), z.dt)) / b};
        if (diverged(z))
            return std::nullopt;
    }
    return Evaluation{{y.d - z.d, y.dt - z.dt}, Jf - Jb};
}

double norm2(const Vec2& v) { return std::hypot(v.d, v.dt); }

struct NewtonOutcome {
    PlanePoint x;
    double residual;
    bool converged;
};

// Damped Newton: full step, halved until the residual norm decreases.
template <typename Residual>
std::optional<NewtonOutcome> damped_newton(PlanePoint x, Residual&& residual) {
    auto ev = residual(x);
    if (!ev)
        return std::nullopt;
    double fnorm = norm2(ev->value);
    for (int it = 0; it < tolerances::newton_max_iterations; ++it) {
        if (fnorm <= tolerances::newton * (1.0 + sup_norm(x)))
            return NewtonOutcome{x, fnorm, true};
        const Mat2& J = ev->jacobian;
        const double det = J.det();
        if (!std::isfinite(det) || det == 0.0)
            return std::nullopt;
        const Vec2 step{(-J.a22 * ev->value.d + J.a12 * ev->value.dt) / det,
                        (J.a21 * ev->value.d - J.a11 * ev->value.dt) / det};
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= tolerances::newton_max_halvings; ++h, lambda *= 0.5) {
            const PlanePoint trial{x.d + lambda * step.d, x.dt + lambda * step.dt};
            auto trial_ev = residual(trial);
            if (!trial_ev)
                continue;
            const double trial_norm = norm2(trial_ev->value);
            if (trial_norm < fnorm) {
                x = trial;
                ev = trial_ev;
                fnorm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }
    return NewtonOutcome{x, fnorm, fnorm <= tolerances::newton * (1.0 + sup_norm(x))};
}

double condition_number(const Mat2& m) {
    // Singular values of a 2x2 matrix from the invariants of m^T m.
    const double f2 = m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22;
    const double det = std::abs(m.det());
    const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * det * det));
    const double smax = std::sqrt(0.5 * (f2 + disc));
    const double smin = det / smax;
    if (!(smin > 0.0))
        return std::numeric_limits<double>::infinity();
    return smax / smin;
}

double halton(std::size_t index, unsigned base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<PlanePoint> halton_seeds(const Box& box, std::size_t count, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    const double shift_u = unit_from_bits(rng());
    const double shift_v = unit_from_bits(rng());
    std::vector<PlanePoint> seeds;
    seeds.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        double u = halton(i, 2) + shift_u;
        double v = halton(i, 3) + shift_v;
        u -= std::floor(u);
        v -= std::floor(v);
        seeds.push_back({box.d_min + u * (box.d_max - box.d_min),
                         box.dt_min + v * (box.dt_max - box.dt_min)});
    }
    return seeds;
}

bool in_open_quadrant(const PlanePoint& x, double tol) { return x.d > tol && x.dt > tol; }

std::vector<PlanePoint> trajectory(const AlgebraParams& p, PlanePoint x, std::size_t n) {
    std::vector<PlanePoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(x);
        if (i + 1 < n)
            x = apply(p, x);
    }
    return pts;
}

double cycle_defect(const AlgebraParams& p, const std::vector<PlanePoint>& pts) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PlanePoint& next = pts[(i + 1) % pts.size()];
        worst = std::max(worst, sup_dist(apply(p, pts[i]), next) / (1.0 + sup_norm(next)));
    }
    return worst;
}

// Multiple shooting: Newton on s(x_i) - x_{i+1 mod n} = 0 for all points at once, so every
// step of the stored cycle is consistent to rounding instead of only the n-fold closure.
void polish_cycle(const AlgebraParams& p, std::vector<PlanePoint>& pts) {
    const std::size_t n = pts.size();
    const auto dim = static_cast<Eigen::Index>(2 * n);
    double defect = cycle_defect(p, pts);
    for (int iter = 0; iter < 6 && defect > 1e-15; ++iter) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd F(dim);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(2 * i);
            const auto c_next = static_cast<Eigen::Index>(2 * ((i + 1) % n));
            const PlanePoint y = apply(p, pts[i]);
            const PlanePoint& next = pts[(i + 1) % n];
            F(r) = y.d - next.d;
            F(r + 1) = y.dt - next.dt;
            const Jacobian2 Ji = jacobian(p, pts[i]);
            J(r, r) += Ji[0][0];
            J(r, r + 1) += Ji[0][1];
            J(r + 1, r) += Ji[1][0];
            J(r + 1, r + 1) += Ji[1][1];
            J(r, c_next) -= 1.0;
            J(r + 1, c_next + 1) -= 1.0;
        }
        const Eigen::VectorXd step = J.partialPivLu().solve(F);
        if (!step.allFinite())
            return;
        std::vector<PlanePoint> trial = pts;
        for (std::size_t i = 0; i < n; ++i) {
            trial[i].d -= step(static_cast<Eigen::Index>(2 * i));
            trial[i].dt -= step(static_cast<Eigen::Index>(2 * i + 1));
        }
        const double trial_defect = cycle_defect(p, trial);
        if (!(trial_defect < defect))
            return;
        pts = std::move(trial);
        defect = trial_defect;
    }
}

void rotate_to_smallest(PeriodicOrbit& orbit) {
    auto less = [](const PlanePoint& a, const PlanePoint& b) {
        return a.d < b.d || (a.d == b.d && a.dt < b.dt);
    };
    auto it = std::min_element(orbit.points.begin(), orbit.points.end(), less);
    std::rotate(orbit.points.begin(), it, orbit.points.end());
}

struct SeedOutcome {
    enum class Kind { none, root, singular } kind = Kind::none;
    PlanePoint root;
    double condition = 0.0;
};

SeedOutcome solve_seed(const AlgebraParams& p, std::size_t period, const Box& box,
                       const PlanePoint& seed, bool invertible) {
    auto full = [&](const PlanePoint& x) { return return_map_residual(p, x, period); };
    std::optional<NewtonOutcome> out;
    if (invertible && period > 1) {
        auto balanced = [&](const PlanePoint& x) { return balanced_residual(p, x, period); };
        auto coarse = damped_newton(seed, balanced);
        // Stalling just short of the tolerance is common at long periods; the
        // polishing pass on the full return map decides.
        if (!coarse || coarse->residual > 1e-6 * (1.0 + sup_norm(coarse->x)))
            return {};
        out = damped_newton(coarse->x, full);
    } else {
        out = damped_newton(seed, full);
    }
    if (!out)
        return {};
    const PlanePoint x = out->x;
    if (!box.contains(x))
        return {};
    auto ev = full(x);
    if (!ev || norm2(ev->value) > tolerances::orbit * (1.0 + sup_norm(x)))
        return {};
    const double cond = condition_number(ev->jacobian);
    if (cond > tolerances::singular_condition)
        return {SeedOutcome::Kind::singular, x, cond};
    return {SeedOutcome::Kind::root, x, cond};
}

bool shares_point(const PeriodicOrbit& a, const PeriodicOrbit& b) {
    for (const auto& x : a.points)
        for (const auto& y : b.points)
            if (sup_dist(x, y) <= tolerances::dedup)
                return true;
    return false;
}

bool is_identity_on_box(const AlgebraParams& p, std::size_t period, const Box& box) {
    const auto probes = halton_seeds(box, 8, 0);
    for (const auto& x : probes) {
        try {
            if (!close(iterate(p, x, period), x, tolerances::orbit))
                return false;
        } catch (const DivergenceError&) {
            return false;
        }
    }
    return true;
}

std::size_t gcd(std::size_t a, std::size_t b) { return std::gcd(a, b); }

class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t bits) { mpfr_init2(value_, bits); mpfr_set_zero(value_, 1); }
    Mpfr(mpfr_prec_t bits, double v) { mpfr_init2(value_, bits); mpfr_set_d(value_, v, MPFR_RNDN); }
    ~Mpfr() { mpfr_clear(value_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;

    mpfr_ptr get() { return value_; }

private:
    mpfr_t value_;
};

} // namespace

PlanePoint apply(const AlgebraParams& p, const PlanePoint& x) {
    const PlanePoint y{p.alpha() + poly(p.beta(), x.dt) + poly(p.gamma(), x.d), x.d};
    if (!std::isfinite(y.d) || !std::isfinite(y.dt))
        throw DivergenceError("dynamical map overflowed at (" + std::to_string(x.d) + ", " +
                              std::to_string(x.dt) + ")");
    return y;
}

Jacobian2 jacobian(const AlgebraParams& p, const PlanePoint& x) {
    const Mat2 m = jac(p, x);
    return {{{m.a11, m.a12}, {m.a21, m.a22}}};
}

bool is_invertible(const AlgebraParams& p) {
    const auto& beta = p.beta();
    return beta[0] != 0.0 && std::all_of(beta.begin() + 1, beta.end(), [](double v) { return v == 0.0; });
}

PlanePoint inverse(const AlgebraParams& p, const PlanePoint& y) {
    if (!is_invertible(p))
        throw NotInvertibleError("dynamical map is only inverted when beta = (b, 0, ..., 0) with b != 0");
    const PlanePoint x{y.dt, (y.d - p.alpha() - poly(p.gamma(), y.dt)) / p.beta_k(1)};
    if (!std::isfinite(x.d) || !std::isfinite(x.dt))
        throw DivergenceError("inverse map overflowed");
    return x;
}

PlanePoint iterate(const AlgebraParams& p, PlanePoint x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        x = apply(p, x);
    return x;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("REP_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t OrbitSearchResult::periodic_point_count() const {
    std::size_t n = 0;
    for (const auto& o : all_orbits)
        n += o.period();
    return n;
}

OrbitSearchResult find_periodic_orbits(const AlgebraParams& p, std::size_t period, const Box& box,
                                       const OrbitSearchOptions& options) {
    if (period == 0)
        throw PreconditionError("period must be at least 1");
    if (options.seeds == 0)
        throw PreconditionError("seed count must be at least 1");
    if (!(box.d_max > box.d_min) || !(box.dt_max > box.dt_min))
        throw PreconditionError("search box must have positive extent");
    if (is_identity_on_box(p, period, box))
        throw DegenerateMapError("s^" + std::to_string(period) +
                                 " is the identity on the search box; orbits form a continuum "
                                 "(use the first-order analytic classification)");

    const bool invertible = is_invertible(p);
    const auto seeds = halton_seeds(box, options.seeds, options.rng_seed);
    std::vector<SeedOutcome> outcomes(seeds.size());

    unsigned threads = options.threads ? options.threads : default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, seeds.size()));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            outcomes[i] = solve_seed(p, period, box, seeds[i], invertible);
    };
    if (threads <= 1) {
        work(0, seeds.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (seeds.size() + threads - 1) / threads;
        for (std::size_t begin = 0; begin < seeds.size(); begin += chunk)
            pool.emplace_back(work, begin, std::min(seeds.size(), begin + chunk));
    }

    // Deterministic merge in seed order.
    OrbitSearchResult result;
    for (const auto& out : outcomes) {
        if (out.kind == SeedOutcome::Kind::singular) {
            const bool seen = std::any_of(
                result.singular_roots.begin(), result.singular_roots.end(),
                [&](const SingularRoot& s) { return sup_dist(s.point, out.root) <= tolerances::dedup; });
            if (!seen)
                result.singular_roots.push_back({out.root, out.condition});
            continue;
        }
        if (out.kind != SeedOutcome::Kind::root)
            continue;
        std::size_t m = 0;
        try {
            m = minimal_period(p, out.root, period, tolerances::orbit);
        } catch (const Error&) {
            continue;
        }
        PeriodicOrbit orbit{trajectory(p, out.root, m)};
        try {
            polish_cycle(p, orbit.points);
        } catch (const Error&) {
        }
        const bool duplicate = std::any_of(result.all_orbits.begin(), result.all_orbits.end(),
                                           [&](const PeriodicOrbit& o) { return shares_point(o, orbit); });
        if (duplicate)
            continue;
        rotate_to_smallest(orbit);
        result.all_orbits.push_back(orbit);
    }

    auto lex = [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.period() != b.period())
            return a.period() < b.period();
        const auto& x = a.points.front();
        const auto& y = b.points.front();
        return x.d < y.d || (x.d == y.d && x.dt < y.dt);
    };
    std::sort(result.all_orbits.begin(), result.all_orbits.end(), lex);
    for (const auto& o : result.all_orbits) {
        if (o.period() != period)
            continue;
        if (std::all_of(o.points.begin(), o.points.end(),
                        [](const PlanePoint& x) { return in_open_quadrant(x, tolerances::orbit); }))
            result.orbits.push_back(o);
    }
    return result;
}

std::size_t minimal_period(const AlgebraParams& p, const PlanePoint& x, std::size_t n, double tol) {
    if (n == 0)
        throw PreconditionError("period must be at least 1");
    std::vector<PlanePoint> pts;
    pts.reserve(n + 1);
    PlanePoint y = x;
    for (std::size_t i = 0; i < n; ++i) {
        y = apply(p, y);
        pts.push_back(y);
    }
    if (!close(pts.back(), x, tol))
        throw NotPeriodicError("point is not periodic with period " + std::to_string(n));
    for (std::size_t m = 1; m < n; ++m)
        if (n % m == 0 && close(pts[m - 1], x, tol))
            return m;
    return n;
}

bool is_valid_orbit(const AlgebraParams& p, const PeriodicOrbit& orbit, double tol) {
    const std::size_t n = orbit.period();
    if (n == 0)
        return false;
    try {
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_open_quadrant(orbit.points[i], tol))
                return false;
            if (!close(apply(p, orbit.points[i]), orbit.points[(i + 1) % n], tol))
                return false;
        }
        // Closure is covered by the wrap-around step; minimality by the stored points, which
        // avoids re-iterating s^n across an expanding orbit.
        for (std::size_t m = 1; m < n; ++m)
            if (n % m == 0 && close(orbit.points[m], orbit.points.front(), tol))
                return false;
        return true;
    } catch (const Error&) {
        return false;
    }
}

bool is_valid_string(const AlgebraParams& p, const NString& str, double tol) {
    const std::size_t n = str.length();
    if (n == 0)
        return false;
    if (n == 1)
        return str.points[0].d == 0.0 && str.points[0].dt == 0.0;
    const auto& first = str.points.front();
    const auto& last = str.points.back();
    if (first.dt != 0.0 || !(first.d > tol) || last.d != 0.0 || !(last.dt > tol))
        return false;
    try {
        for (std::size_t i = 1; i + 1 < n; ++i)
            if (!in_open_quadrant(str.points[i], tol))
                return false;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!close(apply(p, str.points[i]), str.points[i + 1], tol))
                return false;
    } catch (const Error&) {
        return false;
    }
    return true;
}

std::vector<NString> find_strings(const AlgebraParams& p, std::size_t length, double a_max,
                                  std::size_t grid) {
    if (length == 0)
        throw PreconditionError("string length must be at least 1");
    if (length == 1)
        return {NString{{PlanePoint{0.0, 0.0}}}};
    if (!(a_max > 0.0))
        throw PreconditionError("a_max must be positive");
    if (grid == 0)
        throw PreconditionError("grid must contain at least one point");

    auto g = [&](double a) {
        PlanePoint x{a, 0.0};
        for (std::size_t i = 0; i + 1 < length; ++i) {
            x = {p.alpha() + poly(p.beta(), x.dt) + poly(p.gamma(), x.d), x.d};
            if (!std::isfinite(x.d) || !std::isfinite(x.dt))
                return std::numeric_limits<double>::quiet_NaN();
        }
        return x.d;
    };

    std::vector<double> roots;
    double a_prev = a_max / static_cast<double>(grid);
    double g_prev = g(a_prev);
    if (g_prev == 0.0)
        roots.push_back(a_prev);
    for (std::size_t i = 2; i <= grid; ++i) {
        const double a = a_max * static_cast<double>(i) / static_cast<double>(grid);
        const double ga = g(a);
        if (ga == 0.0) {
            roots.push_back(a);
        } else if (std::isfinite(g_prev) && std::isfinite(ga) && g_prev != 0.0 &&
                   std::signbit(g_prev) != std::signbit(ga)) {
            double lo = a_prev;
            double hi = a;
            double glo = g_prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi)
                    break;
                const double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(gm) == std::signbit(glo)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi);
        }
        a_prev = a;
        g_prev = ga;
    }

    std::vector<NString> strings;
    for (const double a : roots) {
        NString str;
        PlanePoint x{a, 0.0};
        bool ok = true;
        for (std::size_t i = 0; i < length; ++i) {
            str.points.push_back(x);
            if (i + 1 < length) {
                x = {p.alpha() + poly(p.beta(), x.dt) + poly(p.gamma(), x.d), x.d};
                if (!std::isfinite(x.d)) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok)
            continue;
        auto& last = str.points.back();
        if (std::abs(last.d) > tolerances::orbit * (1.0 + std::abs(last.dt)))
            continue;
        last.d = 0.0;
        if (is_valid_string(p, str, tolerances::orbit))
            strings.push_back(std::move(str));
    }
    return strings;
}

// First-order algebras ---------------------------------------------------

FirstOrderClassification first_order_analytic(const AlgebraParams& p, std::size_t max_period) {
    if (p.order() != 1)
        throw WrongOrderError("first-order classification requires an order-1 algebra, got order " +
                              std::to_string(p.order()));
    FirstOrderClassification c;
    const double beta1 = p.beta_k(1);
    const double gamma1 = p.gamma_k(1);
    c.p_hat = gamma1 / 2.0;
    c.q_hat = beta1 + c.p_hat * c.p_hat;

    const double denom = 1.0 - beta1 - gamma1;
    if (denom != 0.0) {
        const double d = p.alpha() / denom;
        c.fixed_point = PlanePoint{d, d};
    }

    const std::complex<double> root = std::sqrt(std::complex<double>(c.q_hat, 0.0));
    c.lambda = c.p_hat + root;
    c.mu = c.p_hat - root;
    constexpr double unit_tol = 1e-12;
    c.on_unit_circle = std::abs(std::abs(c.lambda) - 1.0) < unit_tol &&
                       std::abs(std::abs(c.mu) - 1.0) < unit_tol;

    if (c.on_unit_circle && c.q_hat < 0.0) {
        // lambda = exp(2 i theta), theta in (0, pi/2).
        const double theta_over_pi = std::arg(c.lambda) / (2.0 * M_PI);
        for (std::size_t n = 1; n <= max_period && !c.theta_n; ++n) {
            for (std::size_t k = 1; 2 * k < n; ++k) {
                if (gcd(k, n) != 1)
                    continue;
                if (std::abs(theta_over_pi - static_cast<double>(k) / static_cast<double>(n)) < 1e-10) {
                    c.theta_k = k;
                    c.theta_n = n;
                    c.common_period = n;
                    break;
                }
            }
        }
    }

    if (c.common_period && c.fixed_point && c.fixed_point->d > 0.0) {
        const std::size_t n = *c.common_period;
        const PlanePoint xf = *c.fixed_point;
        for (const double rho : {0.1, 0.2, 0.3}) {
            const PlanePoint start{xf.d * (1.0 + rho), xf.dt * (1.0 - 0.5 * rho)};
            PeriodicOrbit orbit{trajectory(p, start, n)};
            if (is_valid_orbit(p, orbit))
                c.sample_orbits.push_back(std::move(orbit));
        }
    }
    return c;
}

AlgebraParams theta_params(std::size_t n, std::size_t k, double alpha) {
    if (n == 0 || k == 0)
        throw PreconditionError("theta_params requires positive n and k");
    if (gcd(k, n) != 1)
        throw NonPrimitiveError("gcd(k, n) = " + std::to_string(gcd(k, n)) + " is not 1");
    if (!(2 * k < n))
        throw PreconditionError("theta = k pi / n must lie in (0, pi/2)");
    const double theta = M_PI * static_cast<double>(k) / static_cast<double>(n);
    return AlgebraParams(alpha, {-1.0}, {2.0 * std::cos(2.0 * theta)});
}

// Henon tooling ----------------------------------------------------------

OrbitCensus henon_orbit_census(double a, double b, double r, std::size_t max_period,
                               std::size_t seeds, unsigned threads, std::uint64_t rng_seed) {
    if (max_period == 0)
        throw PreconditionError("max_period must be at least 1");
    const AlgebraParams p = henon_preset(a, b, r);
    const Box box{0.0, 2.0 * r, 0.0, 2.0 * r};

    // Orbits of each minimal period, pooled over all searches: a period-m orbit met while
    // solving s^n(x) = x (m | n) counts for period m as well.
    std::vector<std::vector<PeriodicOrbit>> pooled(max_period + 1);
    auto admit = [&](const PeriodicOrbit& o) {
        if (!box.contains(o.points.front()) || o.period() > max_period)
            return;
        auto& bucket = pooled[o.period()];
        const bool seen = std::any_of(bucket.begin(), bucket.end(),
                                      [&](const PeriodicOrbit& q) { return shares_point(q, o); });
        if (!seen)
            bucket.push_back(o);
    };
    for (std::size_t n = 1; n <= max_period; ++n) {
        OrbitSearchOptions opts;
        opts.seeds = seeds;
        opts.rng_seed = rng_seed;
        opts.threads = threads;
        const auto found = find_periodic_orbits(p, n, box, opts);
        for (const auto& o : found.all_orbits)
            admit(o);
    }

    OrbitCensus census;
    for (std::size_t n = 1; n <= max_period; ++n) {
        auto& bucket = pooled[n];
        std::sort(bucket.begin(), bucket.end(), [](const PeriodicOrbit& x, const PeriodicOrbit& y) {
            const auto& u = x.points.front();
            const auto& v = y.points.front();
            return u.d < v.d || (u.d == v.d && u.dt < v.dt);
        });
        std::size_t points = 0;
        for (std::size_t m = 1; m <= n; ++m)
            if (n % m == 0)
                points += m * pooled[m].size();
        std::vector<PeriodicOrbit> in_quadrant;
        for (const auto& o : bucket)
            if (std::all_of(o.points.begin(), o.points.end(),
                            [](const PlanePoint& x) { return in_open_quadrant(x, tolerances::orbit); }))
                in_quadrant.push_back(o);
        census.rows.push_back({n, points, bucket.size()});
        census.orbits.push_back(std::move(in_quadrant));
    }
    return census;
}

double shift_conjugation_residual(double a, double b, double r, const PlanePoint& x, std::size_t n) {
    if (n == 0)
        return 0.0;

    // Rounding in either route is amplified by the size of the iterates and by the product
    // of the derivatives along the trajectory. Bound both (log2) from a double pass, falling
    // back to the squaring bound once doubles overflow, and size the precision from them.
    const double c = std::log2(2.0 + std::abs(a) + std::abs(b) + 2.0 * std::abs(r));
    double mag = std::log2(2.0 + sup_norm(x) + std::abs(r));
    double peak = mag;
    double amplification = 0.0;
    double px = x.d;
    double py = x.dt;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        amplification += mag + 2.0;
        if (finite) {
            const double nx = a - b * py - px * px;
            py = px;
            px = nx;
            finite = std::isfinite(px) && std::abs(px) < 1e300;
        }
        const double bound = 2.0 * mag + c;
        mag = finite ? std::min(bound, std::log2(2.0 + std::abs(px) + std::abs(py) + std::abs(r)) + c)
                     : bound;
        peak = std::max(peak, mag);
    }
    const auto bits = static_cast<mpfr_prec_t>(std::ceil(128.0 + peak + amplification));

    Mpfr A(bits, a), B(bits, b), R(bits, r);
    Mpfr alpha(bits), tmp(bits);
    // alpha = a + r + b r - r^2 at working precision.
    mpfr_add(alpha.get(), A.get(), R.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), B.get(), R.get(), MPFR_RNDN);
    mpfr_add(alpha.get(), alpha.get(), tmp.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), R.get(), R.get(), MPFR_RNDN);
    mpfr_sub(alpha.get(), alpha.get(), tmp.get(), MPFR_RNDN);

    Mpfr fx(bits, x.d), fy(bits, x.dt), sx(bits), sy(bits), next(bits);
    mpfr_add(sx.get(), fx.get(), R.get(), MPFR_RNDN);
    mpfr_add(sy.get(), fy.get(), R.get(), MPFR_RNDN);
    for (std::size_t i = 0; i < n; ++i) {
        // f(x, y) = (a - b y - x^2, x)
        mpfr_mul(next.get(), B.get(), fy.get(), MPFR_RNDN);
        mpfr_sub(next.get(), A.get(), next.get(), MPFR_RNDN);
        mpfr_mul(tmp.get(), fx.get(), fx.get(), MPFR_RNDN);
        mpfr_sub(next.get(), next.get(), tmp.get(), MPFR_RNDN);
        mpfr_set(fy.get(), fx.get(), MPFR_RNDN);
        mpfr_set(fx.get(), next.get(), MPFR_RNDN);

        // s(x, y) = alpha - b y + 2 r x - x^2, i.e. beta = (-b, 0), gamma = (2r, -1)
        mpfr_mul(next.get(), B.get(), sy.get(), MPFR_RNDN);
        mpfr_sub(next.get(), alpha.get(), next.get(), MPFR_RNDN);
        mpfr_mul(tmp.get(), R.get(), sx.get(), MPFR_RNDN);
        mpfr_mul_2ui(tmp.get(), tmp.get(), 1, MPFR_RNDN);
        mpfr_add(next.get(), next.get(), tmp.get(), MPFR_RNDN);
        mpfr_mul(tmp.get(), sx.get(), sx.get(), MPFR_RNDN);
        mpfr_sub(next.get(), next.get(), tmp.get(), MPFR_RNDN);
        mpfr_set(sy.get(), sx.get(), MPFR_RNDN);
        mpfr_set(sx.get(), next.get(), MPFR_RNDN);
    }
    Mpfr ex(bits), ey(bits);
    mpfr_add(ex.get(), fx.get(), R.get(), MPFR_RNDN);
    mpfr_sub(ex.get(), ex.get(), sx.get(), MPFR_RNDN);
    mpfr_add(ey.get(), fy.get(), R.get(), MPFR_RNDN);
    mpfr_sub(ey.get(), ey.get(), sy.get(), MPFR_RNDN);
    mpfr_hypot(tmp.get(), ex.get(), ey.get(), MPFR_RNDN);
    return mpfr_get_d(tmp.get(), MPFR_RNDN);
}

} // namespace replab
