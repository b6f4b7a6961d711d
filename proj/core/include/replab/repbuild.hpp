#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "replab/algebra.hpp"
#include "replab/dynamics.hpp"

namespace replab {

enum class RepKind { loop, string, general };

const char* to_string(RepKind kind);
RepKind rep_kind_from_string(const std::string& s);

/// A hermitian representation, given by the matrix W (V = W^dagger).
struct Representation {
    CMatrix W;
    RepKind kind = RepKind::general;
    /// Corner phase in [0, 2 pi); only meaningful for loops.
    double phase = 0.0;
    std::optional<std::variant<PeriodicOrbit, NString>> source;

    std::size_t dim() const { return static_cast<std::size_t>(W.rows()); }
};

struct SpectrumPoint {
    PlanePoint point;
    std::size_t multiplicity = 1;
};

/// W_{k,k+1} = sqrt(d_k), W_{N,1} = e^{i phase} sqrt(d_N).
/// Throws InvalidOrbitError unless the orbit is a valid periodic orbit in the open quadrant.
Representation build_loop_rep(const AlgebraParams& p, const PeriodicOrbit& orbit, double phase);

/// W_{k,k+1} = sqrt(d_k) for k < N; the length-1 string gives the 1x1 zero matrix.
Representation build_string_rep(const AlgebraParams& p, const NString& str);

/// Grouping tolerance 1e-8 (1 + max coordinate) for a set of spectrum points.
double spectral_tolerance(const std::vector<PlanePoint>& points);

/// Paired eigenvalues of (W W^dagger, W^dagger W), grouped with multiplicity and sorted
/// lexicographically. Throws NotARepresentationError if the two do not commute.
std::vector<SpectrumPoint> spectrum(const Representation& rep);

/// Determinant of W; exact for canonical loop and string matrices.
Complex determinant(const Representation& rep);

/// Equivalence of irreducibles: equal spectra and equal determinants.
/// Throws PreconditionError if either input is not a single loop or string.
bool equivalent(const Representation& a, const Representation& b, const AlgebraParams& p);

/// True iff the dynamical map separates the distinct spectrum points.
bool locally_injective(const Representation& rep, const AlgebraParams& p);
bool locally_injective(const std::vector<PlanePoint>& points, const AlgebraParams& p);

/// Block-diagonal direct sum of the given representations (kind general).
Representation direct_sum(const std::vector<Representation>& reps);

double canonical_phase(double phase);

} // namespace replab
