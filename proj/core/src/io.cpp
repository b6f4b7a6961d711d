#include "replab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "replab/errors.hpp"

namespace replab::io {

using nlohmann::json;

namespace {

void dump(const json& j, std::string& out) {
    switch (j.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys already sorted
            if (!first)
                out += ',';
            first = false;
            out += json(it.key()).dump();
            out += ':';
            dump(it.value(), out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i)
                out += ',';
            dump(j[i], out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float:
        out += format_double(j.get<double>());
        break;
    default:
        out += j.dump();
    }
}

std::string canonical(const json& j) {
    std::string out;
    dump(j, out);
    out += '\n';
    return out;
}

json parse(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

template <typename T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

json algebra_json(const AlgebraParams& p) {
    return json{{"order", p.order()}, {"alpha", p.alpha()}, {"beta", p.beta()}, {"gamma", p.gamma()}};
}

AlgebraParams algebra_of(const json& j) {
    const auto alpha = field<double>(j, "alpha");
    auto beta = field<std::vector<double>>(j, "beta");
    auto gamma = field<std::vector<double>>(j, "gamma");
    if (j.contains("order") && field<std::size_t>(j, "order") != beta.size())
        throw FormatError("'order' does not match the length of 'beta'");
    return AlgebraParams(alpha, std::move(beta), std::move(gamma));
}

json points_json(const std::vector<PlanePoint>& pts) {
    json a = json::array();
    for (const auto& x : pts)
        a.push_back(json::array({x.d, x.dt}));
    return a;
}

std::vector<PlanePoint> points_of(const json& j) {
    if (!j.is_array())
        throw FormatError("'points' must be an array of [d, dt] pairs");
    std::vector<PlanePoint> pts;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw FormatError("each point must be a [d, dt] pair");
        pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return pts;
}

json record_json(const OrbitRecord& r) {
    json j{{"kind", to_string(r.kind)}, {"period", r.points.size()}, {"points", points_json(r.points)}};
    if (r.algebra)
        j["algebra"] = algebra_json(*r.algebra);
    return j;
}

OrbitRecord record_from(const json& j) {
    OrbitRecord r;
    r.kind = rep_kind_from_string(field<std::string>(j, "kind"));
    if (r.kind == RepKind::general)
        throw FormatError("orbit records must be of kind 'loop' or 'string'");
    r.points = points_of(j.at("points"));
    if (j.contains("period") && field<std::size_t>(j, "period") != r.points.size())
        throw FormatError("'period' does not match the number of points");
    if (j.contains("algebra"))
        r.algebra = algebra_of(j.at("algebra"));
    return r;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_of(const json& j, std::size_t dim, const char* name) {
    if (!j.is_array() || j.size() != dim)
        throw FormatError(std::string("'") + name + "' must have " + std::to_string(dim) + " rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        if (!j[i].is_array() || j[i].size() != dim)
            throw FormatError(std::string("'") + name + "' must be square");
        for (std::size_t k = 0; k < dim; ++k) {
            if (!j[i][k].is_number())
                throw FormatError(std::string("'") + name + "' entries must be numbers");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
        }
    }
    return m;
}

bool matches_pattern(const CMatrix& W, RepKind kind) {
    const Eigen::Index n = W.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) {
            const bool super = (k == i + 1);
            const bool corner = kind == RepKind::loop && i == n - 1 && k == 0;
            if (!super && !corner && W(i, k) != Complex(0.0, 0.0))
                return false;
            if (super && (W(i, k).imag() != 0.0 || W(i, k).real() < 0.0))
                return false;
        }
    return true;
}

json representation_json(const Representation& rep) {
    return json{{"dim", rep.dim()},
                {"kind", to_string(rep.kind)},
                {"phase", rep.phase},
                {"w_re", matrix_json(rep.W.real())},
                {"w_im", matrix_json(rep.W.imag())}};
}

} // namespace

std::string format_double(double v) {
    if (!std::isfinite(v))
        return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Keep a float marker so integral values read back as floating point.
    if (s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    return s;
}

std::string algebra_to_json(const AlgebraParams& p) { return canonical(algebra_json(p)); }

AlgebraParams algebra_from_json(std::string_view text) { return algebra_of(parse(text)); }

OrbitRecord record_of(const PeriodicOrbit& orbit, const std::optional<AlgebraParams>& p) {
    return {RepKind::loop, orbit.points, p};
}

OrbitRecord record_of(const NString& str, const std::optional<AlgebraParams>& p) {
    return {RepKind::string, str.points, p};
}

std::string orbit_record_to_json(const OrbitRecord& r) { return canonical(record_json(r)); }

std::string orbit_records_to_json(const std::vector<OrbitRecord>& records) {
    json a = json::array();
    for (const auto& r : records)
        a.push_back(record_json(r));
    return canonical(a);
}

std::vector<OrbitRecord> orbit_records_from_json(std::string_view text) {
    const json j = parse(text);
    std::vector<OrbitRecord> out;
    if (j.is_array()) {
        for (const auto& e : j)
            out.push_back(record_from(e));
    } else {
        out.push_back(record_from(j));
    }
    return out;
}

std::string representation_to_json(const Representation& rep) { return canonical(representation_json(rep)); }

std::string representations_to_json(const std::vector<Representation>& reps) {
    json a = json::array();
    for (const auto& r : reps)
        a.push_back(representation_json(r));
    return canonical(a);
}


Representation representation_from_json(std::string_view text) {
    const json j = parse(text);
    const auto dim = field<std::size_t>(j, "dim");
    if (dim == 0)
        throw FormatError("'dim' must be positive");
    Representation rep;
    const Eigen::MatrixXd re = matrix_of(j.at("w_re"), dim, "w_re");
    const Eigen::MatrixXd im = j.contains("w_im") ? matrix_of(j.at("w_im"), dim, "w_im")
                                                  : Eigen::MatrixXd::Zero(re.rows(), re.cols());
    rep.W = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
    rep.kind = j.contains("kind") ? rep_kind_from_string(field<std::string>(j, "kind")) : RepKind::general;
    rep.phase = j.contains("phase") ? canonical_phase(field<double>(j, "phase")) : 0.0;
    if (rep.kind != RepKind::general && !matches_pattern(rep.W, rep.kind))
        throw FormatError(std::string("matrix does not have the canonical ") + to_string(rep.kind) + " pattern");
    return rep;
}

std::string decomposition_to_json(const DecompositionReport& report) {
    json blocks = json::array();
    for (const auto& b : report.blocks) {
        std::vector<PlanePoint> pts;
        for (const auto& s : b.spectrum)
            for (std::size_t m = 0; m < s.multiplicity; ++m)
                pts.push_back(s.point);
        blocks.push_back(json{{"dim", b.rep.dim()},
                              {"kind", to_string(b.rep.kind)},
                              {"phase", b.rep.phase},
                              {"residual", b.residual.max()},
                              {"spectrum", points_json(pts)}});
    }
    return canonical(json{{"blocks", blocks}, {"leakage", report.offdiag_leakage}});
}

std::string residual_to_json(const RelationResidual& r, double scale, double tol) {
    return canonical(json{{"commutator_norm", r.commutator_norm},
                          {"conjugate_norm", r.conjugate_norm},
                          {"primary_norm", r.primary_norm},
                          {"scale", scale},
                          {"tolerance", tol},
                          {"pass", r.max() < tol * scale}});
}

std::string census_to_csv(const OrbitCensus& census) {
    std::ostringstream os;
    os << "period,points_found,minimal_orbits\n";
    for (const auto& row : census.rows)
        os << row.period << ',' << row.points_found << ',' << row.minimal_orbits << '\n';
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write '" + path + "'");
    out << contents;
}

} // namespace replab::io
