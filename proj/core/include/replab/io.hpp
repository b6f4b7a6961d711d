#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "replab/algebra.hpp"
#include "replab/dynamics.hpp"
#include "replab/repbuild.hpp"
#include "replab/specgraph.hpp"

// JSON and CSV interchange. JSON output is compact with sorted keys and every
// floating-point number printed with 17 significant digits, so reruns are byte-identical.
namespace replab::io {

/// {"alpha": x, "beta": [...], "gamma": [...], "order": n}
std::string algebra_to_json(const AlgebraParams& p);
AlgebraParams algebra_from_json(std::string_view text);

/// One orbit or string: {"algebra": {...}, "kind": "loop"|"string", "period": N, "points": [[d, dt], ...]}
struct OrbitRecord {
    RepKind kind = RepKind::loop;
    std::vector<PlanePoint> points;
    std::optional<AlgebraParams> algebra;
};

OrbitRecord record_of(const PeriodicOrbit& orbit, const std::optional<AlgebraParams>& p = std::nullopt);
OrbitRecord record_of(const NString& str, const std::optional<AlgebraParams>& p = std::nullopt);

/// A single record is written as an object; lists as an array of objects.
std::string orbit_record_to_json(const OrbitRecord& r);
std::string orbit_records_to_json(const std::vector<OrbitRecord>& records);
/// Accepts a single object or an array of objects.
std::vector<OrbitRecord> orbit_records_from_json(std::string_view text);

/// {"dim": N, "kind": ..., "phase": ..., "w_im": [[...]], "w_re": [[...]]}, row-major.
std::string representation_to_json(const Representation& rep);
Representation representation_from_json(std::string_view text);
/// Array of representation objects.
std::string representations_to_json(const std::vector<Representation>& reps);

/// {"blocks": [{"dim", "kind", "phase", "residual", "spectrum"}], "leakage": ...}
std::string decomposition_to_json(const DecompositionReport& report);

std::string residual_to_json(const RelationResidual& r, double scale, double tol);

/// Header "period,points_found,minimal_orbits".
std::string census_to_csv(const OrbitCensus& census);

/// Decimal rendering with 17 significant digits.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

} // namespace replab::io
