#include "replab/repbuild.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "replab/errors.hpp"
#include "replab/specgraph.hpp"

namespace replab {

namespace {

bool lex_less(const PlanePoint& a, const PlanePoint& b) {
    return a.d < b.d || (a.d == b.d && a.dt < b.dt);
}

double sup_dist(const PlanePoint& a, const PlanePoint& b) {
    return std::max(std::abs(a.d - b.d), std::abs(a.dt - b.dt));
}

std::vector<SpectrumPoint> group_points(std::vector<PlanePoint> pts) {
    const double tol = spectral_tolerance(pts);
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<SpectrumPoint> groups;
    std::vector<PlanePoint> sums;
    for (const auto& x : pts) {
        bool merged = false;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (sup_dist(groups[g].point, x) <= tol) {
                auto& s = sums[g];
                s.d += x.d;
                s.dt += x.dt;
                const double m = static_cast<double>(++groups[g].multiplicity);
                groups[g].point = {s.d / m, s.dt / m};
                merged = true;
                break;
            }
        }
        if (!merged) {
            groups.push_back({x, 1});
            sums.push_back(x);
        }
    }
    std::sort(groups.begin(), groups.end(),
              [](const SpectrumPoint& a, const SpectrumPoint& b) { return lex_less(a.point, b.point); });
    return groups;
}

bool is_irreducible(const Representation& rep) {
    if (rep.kind == RepKind::loop || rep.kind == RepKind::string)
        return true;
    const auto comps = classify(digraph_of(rep.W));
    return comps.size() == 1 && comps.front().kind != ComponentKind::other;
}

} // namespace

const char* to_string(RepKind kind) {
    switch (kind) {
    case RepKind::loop: return "loop";
    case RepKind::string: return "string";
    case RepKind::general: return "general";
    }
    return "general";
}

RepKind rep_kind_from_string(const std::string& s) {
    if (s == "loop")
        return RepKind::loop;
    if (s == "string")
        return RepKind::string;
    if (s == "general")
        return RepKind::general;
    throw FormatError("unknown representation kind '" + s + "'");
}

double canonical_phase(double phase) {
    constexpr double two_pi = 2.0 * M_PI;
    double r = std::fmod(phase, two_pi);
    if (r < 0.0)
        r += two_pi;
    if (r >= two_pi)
        r = 0.0;
    return r;
}

double spectral_tolerance(const std::vector<PlanePoint>& points) {
    double m = 0.0;
    for (const auto& x : points)
        m = std::max({m, std::abs(x.d), std::abs(x.dt)});
    return 1e-8 * (1.0 + m);
}

Representation build_loop_rep(const AlgebraParams& p, const PeriodicOrbit& orbit, double phase) {
    const std::size_t n = orbit.period();
    if (n == 0)
        throw InvalidOrbitError("orbit is empty");
    for (const auto& x : orbit.points)
        if (!(x.d > 0.0))
            throw InvalidOrbitError("orbit point has nonpositive d = " + std::to_string(x.d));
    if (!is_valid_orbit(p, orbit))
        throw InvalidOrbitError("points do not form a minimal-period orbit in the open quadrant");

    Representation rep;
    rep.kind = RepKind::loop;
    rep.phase = canonical_phase(phase);
    rep.W = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k + 1 < n; ++k)
        rep.W(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k + 1)) = std::sqrt(orbit.points[k].d);
    rep.W(static_cast<Eigen::Index>(n - 1), 0) = std::polar(std::sqrt(orbit.points.back().d), rep.phase);
    rep.source = orbit;
    return rep;
}

Representation build_string_rep(const AlgebraParams& p, const NString& str) {
    const std::size_t n = str.length();
    if (n == 0)
        throw InvalidStringError("string is empty");
    for (std::size_t k = 1; k + 1 < n; ++k)
        if (!(str.points[k].d > 0.0))
            throw InvalidStringError("interior string point has nonpositive d");
    if (!is_valid_string(p, str))
        throw InvalidStringError("points do not form a valid string");

    Representation rep;
    rep.kind = RepKind::string;
    rep.W = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k + 1 < n; ++k)
        rep.W(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k + 1)) = std::sqrt(str.points[k].d);
    rep.source = str;
    return rep;
}

std::vector<SpectrumPoint> spectrum(const Representation& rep) {
    const CMatrix& W = rep.W;
    if (W.rows() != W.cols())
        throw ShapeError("spectrum: matrix must be square");
    std::vector<PlanePoint> pts;
    pts.reserve(rep.dim());
    if (rep.kind == RepKind::loop || rep.kind == RepKind::string) {
        // Canonical builds: W W^dagger and W^dagger W are diagonal by construction.
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            pts.push_back({W.row(i).squaredNorm(), W.col(i).squaredNorm()});
    } else {
        const auto jd = simultaneous_diagonalize(W);
        for (Eigen::Index i = 0; i < jd.d.size(); ++i)
            pts.push_back({jd.d(i), jd.dt(i)});
    }
    return group_points(std::move(pts));
}

Complex determinant(const Representation& rep) {
    const CMatrix& W = rep.W;
    const Eigen::Index n = W.rows();
    if (rep.kind == RepKind::string)
        return {0.0, 0.0};
    if (rep.kind == RepKind::loop) {
        // Weighted N-cycle: sign of the cyclic permutation times the product of the weights.
        Complex prod = W(n - 1, 0);
        for (Eigen::Index k = 0; k + 1 < n; ++k)
            prod *= W(k, k + 1);
        return (n % 2 == 0) ? -prod : prod;
    }
    return W.determinant();
}

bool equivalent(const Representation& a, const Representation& b, const AlgebraParams& p) {
    (void)p;
    if (!is_irreducible(a) || !is_irreducible(b))
        throw PreconditionError("equivalence criterion applies to irreducible representations only");
    if (a.dim() != b.dim())
        return false;
    const auto sa = spectrum(a);
    const auto sb = spectrum(b);
    if (sa.size() != sb.size())
        return false;
    std::vector<PlanePoint> all;
    for (const auto& s : sa)
        all.push_back(s.point);
    for (const auto& s : sb)
        all.push_back(s.point);
    const double tol = spectral_tolerance(all);
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (sa[i].multiplicity != sb[i].multiplicity || sup_dist(sa[i].point, sb[i].point) > tol)
            return false;
    return std::abs(determinant(a) - determinant(b)) < tol;
}

bool locally_injective(const std::vector<PlanePoint>& points, const AlgebraParams& p) {
    const double tol = spectral_tolerance(points);
    std::vector<PlanePoint> images;
    images.reserve(points.size());
    for (const auto& x : points) {
        try {
            images.push_back(apply(p, x));
        } catch (const DivergenceError&) {
            return false;
        }
    }
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            if (sup_dist(images[i], images[j]) <= tol)
                return false;
    return true;
}

bool locally_injective(const Representation& rep, const AlgebraParams& p) {
    std::vector<PlanePoint> pts;
    for (const auto& s : spectrum(rep))
        pts.push_back(s.point);
    return locally_injective(pts, p);
}

Representation direct_sum(const std::vector<Representation>& reps) {
    Eigen::Index n = 0;
    for (const auto& r : reps)
        n += r.W.rows();
    Representation sum;
    sum.W = CMatrix::Zero(n, n);
    Eigen::Index offset = 0;
    for (const auto& r : reps) {
        sum.W.block(offset, offset, r.W.rows(), r.W.cols()) = r.W;
        offset += r.W.rows();
    }
    return sum;
}

} // namespace replab
