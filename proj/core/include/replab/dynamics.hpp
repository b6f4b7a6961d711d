#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "replab/algebra.hpp"

namespace replab {

/// Eigenvalue pair (d, dt) of (W W^dagger, W^dagger W) attached to a basis vector.
struct PlanePoint {
    double d = 0.0;
    double dt = 0.0;

    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

using Jacobian2 = std::array<std::array<double, 2>, 2>;

/// Axis-aligned search rectangle [d_min, d_max] x [dt_min, dt_max].
struct Box {
    double d_min = 0.0;
    double d_max = 1.0;
    double dt_min = 0.0;
    double dt_max = 1.0;

    bool contains(const PlanePoint& x) const {
        return x.d >= d_min && x.d <= d_max && x.dt >= dt_min && x.dt <= dt_max;
    }
};

struct PeriodicOrbit {
    std::vector<PlanePoint> points;
    std::size_t period() const { return points.size(); }
};

/// Trajectory (a, 0) -> ... -> (0, b) through the open quadrant.
struct NString {
    std::vector<PlanePoint> points;
    std::size_t length() const { return points.size(); }
};

namespace tolerances {
inline constexpr double orbit = 1e-9;
inline constexpr double dedup = 1e-6;
inline constexpr double divergence = 1e12;
inline constexpr double newton = 1e-12;
inline constexpr int newton_max_iterations = 60;
inline constexpr int newton_max_halvings = 20;
inline constexpr double singular_condition = 1e10;
} // namespace tolerances

/// s(d, dt) = (alpha + sum_k beta_k dt^k + sum_k gamma_k d^k, d).
/// Throws DivergenceError if the image is not finite.
PlanePoint apply(const AlgebraParams& p, const PlanePoint& x);

/// Derivative of s at x, row-major: [[ds1/dd, ds1/ddt], [1, 0]].
Jacobian2 jacobian(const AlgebraParams& p, const PlanePoint& x);

/// Inverse of s when beta = (b, 0, ..., 0) with b != 0 (Henon algebras, and the
/// order-1 maps); throws NotInvertibleError otherwise.
PlanePoint inverse(const AlgebraParams& p, const PlanePoint& y);

bool is_invertible(const AlgebraParams& p);

/// s^n(x); throws DivergenceError on overflow.
PlanePoint iterate(const AlgebraParams& p, PlanePoint x, std::size_t n);

struct OrbitSearchOptions {
    std::size_t seeds = 4096;
    std::uint64_t rng_seed = 0;
    /// 0 means "use REP_LAB_THREADS or the hardware concurrency".
    unsigned threads = 0;
};

/// Newton root that was discarded because (Ds^N - I) is numerically singular there.
struct SingularRoot {
    PlanePoint point;
    double condition = 0.0;
};

struct OrbitSearchResult {
    /// Minimal-period-N orbits whose points all lie in the open quadrant.
    std::vector<PeriodicOrbit> orbits;
    /// Orbits of every minimal period m | N found while solving s^N(x) = x.
    std::vector<PeriodicOrbit> all_orbits;
    std::vector<SingularRoot> singular_roots;

    /// Distinct solutions of s^N(x) = x found, i.e. the summed length of all_orbits.
    std::size_t periodic_point_count() const;
};

/// Multi-start damped Newton search for period-N orbits seeded on a shifted
/// Halton grid over `box`. Throws DegenerateMapError when s^N is the identity
/// on the box.
OrbitSearchResult find_periodic_orbits(const AlgebraParams& p, std::size_t period, const Box& box,
                                       const OrbitSearchOptions& options = {});

/// Smallest divisor m of n with s^m(x) within tol of x (sup norm).
/// Throws NotPeriodicError if s^n(x) is not within tol of x.
std::size_t minimal_period(const AlgebraParams& p, const PlanePoint& x, std::size_t n, double tol);

/// Strings of the given length with initial point (a, 0), a in (0, a_max].
/// Length 1 yields the degenerate string {(0, 0)}.
std::vector<NString> find_strings(const AlgebraParams& p, std::size_t length, double a_max,
                                  std::size_t grid = 10000);

/// Checks the orbit invariants (closure, minimal period, open quadrant).
bool is_valid_orbit(const AlgebraParams& p, const PeriodicOrbit& orbit,
                    double tol = tolerances::orbit);
bool is_valid_string(const AlgebraParams& p, const NString& str, double tol = tolerances::orbit);

// First-order algebras ---------------------------------------------------

struct FirstOrderClassification {
    /// gamma_1 = 2 p_hat, beta_1 = q_hat - p_hat^2.
    double p_hat = 0.0;
    double q_hat = 0.0;
    std::optional<PlanePoint> fixed_point;
    /// Eigenvalues p_hat +- sqrt(q_hat) of the linear part.
    std::complex<double> lambda;
    std::complex<double> mu;
    bool on_unit_circle = false;
    /// theta = k pi / n when the rotation angle is a rational multiple of pi with n <= N_max.
    std::optional<std::size_t> theta_k;
    std::optional<std::size_t> theta_n;
    /// Every non-fixed point has minimal period n (set together with theta_n).
    std::optional<std::size_t> common_period;
    std::vector<PeriodicOrbit> sample_orbits;
};

/// Closed-form classification of orbits of the affine map of an order-1 algebra.
/// Throws WrongOrderError if p.order() != 1.
FirstOrderClassification first_order_analytic(const AlgebraParams& p, std::size_t max_period);

/// Order-1 algebra with gamma_1 = 2 cos 2 theta, beta_1 = -1, theta = k pi / n.
/// Requires 0 < k/n < 1/2 and gcd(k, n) = 1.
AlgebraParams theta_params(std::size_t n, std::size_t k, double alpha);

// Henon tooling ----------------------------------------------------------

struct CensusRow {
    std::size_t period = 0;
    std::size_t points_found = 0;
    std::size_t minimal_orbits = 0;
};

struct OrbitCensus {
    std::vector<CensusRow> rows;
    /// Minimal-period orbits for each period, row-aligned with `rows`.
    std::vector<std::vector<PeriodicOrbit>> orbits;
};

inline constexpr std::uint64_t kCensusSeed = 0x5eed;

/// Period-by-period orbit counts of henon_preset(a, b, r) over [0, 2r]^2. Orbits are pooled
/// across the searches for periods 1..max_period, and points_found(n) is the divisor sum
/// of m * minimal_orbits(m) over m | n.
OrbitCensus henon_orbit_census(double a, double b, double r, std::size_t max_period,
                               std::size_t seeds = 4096, unsigned threads = 0,
                               std::uint64_t rng_seed = kCensusSeed);

/// |f^n(x) + (r, r) - s^n(x + (r, r))| with f the raw Henon map (a - b y - x^2, x).
double shift_conjugation_residual(double a, double b, double r, const PlanePoint& x, std::size_t n);

/// Number of worker threads requested through REP_LAB_THREADS (>= 1).
unsigned default_thread_count();

} // namespace replab
