#include "replab/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "replab/errors.hpp"
#include "replab/io.hpp"

namespace replab::cli {

namespace {

struct Globals {
    std::optional<double> tol;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
};

struct Context {
    const Globals& g;
    std::ostream& out;
    std::ostream& err;

    void emit(const std::string& text) const {
        if (g.out.empty())
            out << text;
        else
            io::write_file(g.out, text);
    }

    bool csv() const { return g.format == "csv"; }

    void json_only(const char* command) const {
        if (csv())
            throw FormatError(std::string(command) + ": CSV output is only available for orbits, strings and henon");
    }

    double tol(double fallback) const { return g.tol.value_or(fallback); }
};

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

AlgebraParams load_algebra(const std::string& path) { return io::algebra_from_json(io::read_file(path)); }

std::string points_csv(const std::vector<io::OrbitRecord>& records) {
    std::ostringstream os;
    os << "record,kind,index,d,dt\n";
    for (std::size_t r = 0; r < records.size(); ++r)
        for (std::size_t i = 0; i < records[r].points.size(); ++i)
            os << r << ',' << to_string(records[r].kind) << ',' << i << ','
               << io::format_double(records[r].points[i].d) << ',' << io::format_double(records[r].points[i].dt)
               << '\n';
    return os.str();
}

void emit_records(const Context& ctx, const std::vector<io::OrbitRecord>& records) {
    ctx.emit(ctx.csv() ? points_csv(records) : io::orbit_records_to_json(records));
}

// orbits --------------------------------------------------------------------

struct OrbitsConfig {
    std::string algebra;
    std::size_t period = 1;
    std::vector<double> box{0.0, 10.0, 0.0, 10.0};
    std::size_t seeds = 4096;
    bool analytic = false;
};

int orbits_analytic(const Context& ctx, const AlgebraParams& p, const OrbitsConfig& cfg) {
    const auto c = first_order_analytic(p, cfg.period);
    auto& e = ctx.err;
    if (c.fixed_point)
        e << "fixed point      (" << fmt(c.fixed_point->d) << ", " << fmt(c.fixed_point->dt) << ")\n";
    else
        e << "fixed point      none\n";
    e << "eigenvalues      " << fmt(c.lambda.real()) << (c.lambda.imag() < 0 ? " - " : " + ")
      << fmt(std::abs(c.lambda.imag())) << "i, " << fmt(c.mu.real()) << (c.mu.imag() < 0 ? " - " : " + ")
      << fmt(std::abs(c.mu.imag())) << "i\n";
    e << "unit circle      " << (c.on_unit_circle ? "yes" : "no") << '\n';
    if (c.theta_n)
        e << "theta            " << *c.theta_k << " pi / " << *c.theta_n << '\n';
    if (c.common_period)
        e << "common period    " << *c.common_period << " (every non-fixed point)\n";
    else
        e << "common period    none up to " << cfg.period << '\n';
    e << "sample orbits    " << c.sample_orbits.size() << '\n';

    std::vector<io::OrbitRecord> records;
    for (const auto& o : c.sample_orbits)
        records.push_back(io::record_of(o, p));
    emit_records(ctx, records);
    return kSuccess;
}

int cmd_orbits(const Context& ctx, const OrbitsConfig& cfg) {
    const AlgebraParams p = load_algebra(cfg.algebra);
    if (cfg.analytic)
        return orbits_analytic(ctx, p, cfg);
    if (cfg.box.size() != 4)
        throw PreconditionError("--box expects d_min,d_max,dt_min,dt_max");
    const Box box{cfg.box[0], cfg.box[1], cfg.box[2], cfg.box[3]};
    if (!(box.d_min < box.d_max && box.dt_min < box.dt_max))
        throw PreconditionError("--box bounds must satisfy min < max");

    OrbitSearchResult result;
    try {
        result = find_periodic_orbits(p, cfg.period, box, {.seeds = cfg.seeds, .rng_seed = ctx.g.seed});
    } catch (const DegenerateMapError& ex) {
        ctx.err << "advice: " << ex.what() << "\nadvice: rerun with --analytic\n";
        return kAdvisory;
    }

    ctx.err << "period  orbits  points  (in box, any sign)\n";
    for (std::size_t m = 1; m <= cfg.period; ++m) {
        if (cfg.period % m != 0)
            continue;
        const auto count = static_cast<std::size_t>(std::count_if(
            result.all_orbits.begin(), result.all_orbits.end(),
            [m](const PeriodicOrbit& o) { return o.period() == m; }));
        ctx.err << fmt(static_cast<double>(m), "%6.0f") << "  " << fmt(static_cast<double>(count), "%6.0f") << "  "
                << fmt(static_cast<double>(m * count), "%6.0f") << '\n';
    }
    ctx.err << "minimal-period " << cfg.period << " orbits in the open quadrant: " << result.orbits.size() << '\n';
    if (!result.singular_roots.empty())
        ctx.err << "warning: " << result.singular_roots.size() << " ill-conditioned roots discarded\n";

    std::vector<io::OrbitRecord> records;
    for (const auto& o : result.orbits)
        records.push_back(io::record_of(o, p));
    emit_records(ctx, records);
    return kSuccess;
}

// strings -------------------------------------------------------------------

struct StringsConfig {
    std::string algebra;
    std::size_t length = 2;
    double amax = 10.0;
    std::size_t grid = 10000;
};

int cmd_strings(const Context& ctx, const StringsConfig& cfg) {
    const AlgebraParams p = load_algebra(cfg.algebra);
    const auto strings = find_strings(p, cfg.length, cfg.amax, cfg.grid);
    ctx.err << "strings of length " << cfg.length << " with a in (0, " << fmt(cfg.amax) << "]: " << strings.size()
            << '\n';
    std::vector<io::OrbitRecord> records;
    for (const auto& s : strings) {
        ctx.err << "  a = " << fmt(s.points.front().d, "%.12g") << "  b = " << fmt(s.points.back().dt, "%.12g")
                << '\n';
        records.push_back(io::record_of(s, p));
    }
    emit_records(ctx, records);
    return kSuccess;
}

// build-rep -----------------------------------------------------------------

struct BuildConfig {
    std::string orbit;
    std::string algebra;
    std::size_t index = 0;
    double phase = 0.0;
};

int cmd_build(const Context& ctx, const BuildConfig& cfg) {
    ctx.json_only("build-rep");
    const auto records = io::orbit_records_from_json(io::read_file(cfg.orbit));
    if (cfg.index >= records.size())
        throw PreconditionError("--index " + std::to_string(cfg.index) + " out of range (" +
                                std::to_string(records.size()) + " records)");
    const auto& rec = records[cfg.index];
    std::optional<AlgebraParams> p = rec.algebra;
    if (!cfg.algebra.empty())
        p = load_algebra(cfg.algebra);
    if (!p)
        throw PreconditionError("no algebra: pass --algebra or embed one in the orbit record");

    const Representation rep = rec.kind == RepKind::loop ? build_loop_rep(*p, PeriodicOrbit{rec.points}, cfg.phase)
                                                         : build_string_rep(*p, NString{rec.points});
    const auto r = relation_residual(*p, rep.W);
    ctx.err << "built " << to_string(rep.kind) << " representation of dimension " << rep.dim()
            << ", residual " << fmt(r.max(), "%.3e") << '\n';
    ctx.emit(io::representation_to_json(rep));
    return kSuccess;
}

// verify --------------------------------------------------------------------

struct RepConfig {
    std::string rep;
    std::string algebra;
};

int cmd_verify(const Context& ctx, const RepConfig& cfg) {
    ctx.json_only("verify");
    const AlgebraParams p = load_algebra(cfg.algebra);
    const Representation rep = io::representation_from_json(io::read_file(cfg.rep));
    const double tol = ctx.tol(1e-9);
    const auto r = relation_residual(p, rep.W);
    const double scale = residual_scale(rep.W);
    const bool pass = r.max() < tol * scale;
    ctx.err << "primary     " << fmt(r.primary_norm, "%.3e") << '\n'
            << "conjugate   " << fmt(r.conjugate_norm, "%.3e") << '\n'
            << "commutator  " << fmt(r.commutator_norm, "%.3e") << '\n'
            << "bound       " << fmt(tol * scale, "%.3e") << '\n'
            << (pass ? "PASS" : "FAIL") << '\n';
    ctx.emit(io::residual_to_json(r, scale, tol));
    return pass ? kSuccess : kVerificationFailed;
}

// decompose -----------------------------------------------------------------

int cmd_decompose(const Context& ctx, const RepConfig& cfg) {
    ctx.json_only("decompose");
    const AlgebraParams p = load_algebra(cfg.algebra);
    const Representation rep = io::representation_from_json(io::read_file(cfg.rep));
    DecompositionReport report;
    try {
        report = decompose(rep, p, ctx.tol(1e-8));
    } catch (const DecompositionFailedError& ex) {
        ctx.err << "error: " << ex.what() << '\n';
        return kVerificationFailed;
    }
    ctx.err << "block  dim  kind    phase       residual\n";
    bool ok = true;
    for (std::size_t i = 0; i < report.blocks.size(); ++i) {
        const auto& b = report.blocks[i];
        const double res = b.residual.max();
        ok = ok && res < 1e-9 * residual_scale(b.rep.W);
        char line[128];
        std::snprintf(line, sizeof line, "%5zu  %3zu  %-6s  %-10.6f  %.3e\n", i, b.rep.dim(), to_string(b.rep.kind),
                      b.rep.phase, res);
        ctx.err << line;
    }
    ctx.err << "leakage " << fmt(report.offdiag_leakage, "%.3e") << '\n';
    ctx.emit(io::decomposition_to_json(report));
    return ok ? kSuccess : kVerificationFailed;
}

// henon ---------------------------------------------------------------------

struct HenonConfig {
    double a = 5.0;
    double b = 0.3;
    double r = 3.0;
    std::size_t max_dim = 10;
    std::size_t seeds = 4096;
    std::string census_out;
    std::string reps_out;
    std::string algebra_out;
};

struct Coverage {
    std::size_t dim = 0;
    std::size_t orbits = 0;
    std::size_t verified = 0;
    std::size_t inequivalent = 0;
    double max_residual = 0.0;
};

int cmd_henon(const Context& ctx, const HenonConfig& cfg) {
    const AlgebraParams p = henon_preset(cfg.a, cfg.b, cfg.r);
    const double tol = ctx.tol(1e-9);
    const OrbitCensus census = henon_orbit_census(cfg.a, cfg.b, cfg.r, cfg.max_dim, cfg.seeds, 0, ctx.g.seed);

    std::vector<Coverage> coverage;
    std::vector<Representation> all_reps;
    bool complete = true;
    for (std::size_t n = 1; n <= cfg.max_dim; ++n) {
        Coverage c;
        c.dim = n;
        c.orbits = census.orbits[n - 1].size();
        std::vector<Representation> verified;
        for (const auto& o : census.orbits[n - 1]) {
            Representation rep = build_loop_rep(p, o, 0.0);
            const double res = relation_residual(p, rep.W).max();
            c.max_residual = std::max(c.max_residual, res);
            if (res < tol * residual_scale(rep.W))
                verified.push_back(std::move(rep));
        }
        c.verified = verified.size();
        // Representatives of the equivalence classes among the verified reps.
        std::vector<const Representation*> classes;
        for (const auto& rep : verified)
            if (std::none_of(classes.begin(), classes.end(),
                             [&](const Representation* q) { return equivalent(*q, rep, p); }))
                classes.push_back(&rep);
        c.inequivalent = classes.size();
        complete = complete && c.inequivalent > 0 && c.verified == c.orbits;
        coverage.push_back(c);
        all_reps.insert(all_reps.end(), std::make_move_iterator(verified.begin()),
                        std::make_move_iterator(verified.end()));
    }

    ctx.err << "dim  census_points  loop_reps  verified  inequivalent  max_residual\n";
    for (std::size_t i = 0; i < coverage.size(); ++i) {
        const auto& c = coverage[i];
        char line[128];
        std::snprintf(line, sizeof line, "%3zu  %13zu  %9zu  %8zu  %12zu  %.3e\n", c.dim,
                      census.rows[i].points_found, c.orbits, c.verified, c.inequivalent, c.max_residual);
        ctx.err << line;
    }
    ctx.err << (complete ? "every dimension 1.." : "MISSING coverage in 1..") << cfg.max_dim << '\n';

    if (!cfg.census_out.empty())
        io::write_file(cfg.census_out, io::census_to_csv(census));
    if (!cfg.algebra_out.empty())
        io::write_file(cfg.algebra_out, io::algebra_to_json(p));
    if (!cfg.reps_out.empty())
        io::write_file(cfg.reps_out, io::representations_to_json(all_reps));

    if (ctx.csv()) {
        std::ostringstream os;
        os << "dim,loop_reps,verified,inequivalent,max_residual\n";
        for (const auto& c : coverage)
            os << c.dim << ',' << c.orbits << ',' << c.verified << ',' << c.inequivalent << ','
               << io::format_double(c.max_residual) << '\n';
        ctx.emit(os.str());
    } else {
        std::ostringstream os;
        os << "{\"algebra\":";
        std::string alg = io::algebra_to_json(p);
        alg.pop_back();
        os << alg << ",\"complete\":" << (complete ? "true" : "false") << ",\"coverage\":[";
        for (std::size_t i = 0; i < coverage.size(); ++i) {
            const auto& c = coverage[i];
            os << (i ? "," : "") << "{\"dim\":" << c.dim << ",\"inequivalent\":" << c.inequivalent
               << ",\"loop_reps\":" << c.orbits << ",\"max_residual\":" << io::format_double(c.max_residual)
               << ",\"points_found\":" << census.rows[i].points_found << ",\"verified\":" << c.verified << '}';
        }
        os << "],\"tolerance\":" << io::format_double(tol) << "}\n";
        ctx.emit(os.str());
    }
    return complete ? kSuccess : kVerificationFailed;
}

// from-surface / theta --------------------------------------------------------

struct SurfaceConfig {
    double hbar = 1.0;
    double alpha0 = 0.0;
    std::vector<double> beta_tilde;
    std::vector<double> gamma_tilde;
};

int cmd_from_surface(const Context& ctx, const SurfaceConfig& cfg) {
    ctx.json_only("from-surface");
    const AlgebraParams p = from_surface({cfg.hbar, cfg.alpha0, cfg.beta_tilde, cfg.gamma_tilde});
    ctx.err << "order " << p.order() << " algebra, alpha = " << fmt(p.alpha(), "%.12g") << '\n';
    ctx.emit(io::algebra_to_json(p));
    return kSuccess;
}

struct ThetaConfig {
    std::size_t n = 3;
    std::size_t k = 1;
    double alpha = 1.0;
};

int cmd_theta(const Context& ctx, const ThetaConfig& cfg) {
    ctx.json_only("theta");
    const AlgebraParams p = theta_params(cfg.n, cfg.k, cfg.alpha);
    ctx.err << "theta = " << cfg.k << " pi / " << cfg.n << ", gamma_1 = " << fmt(p.gamma_k(1), "%.12g")
            << ", beta_1 = " << fmt(p.beta_k(1), "%.12g") << '\n';
    ctx.emit(io::algebra_to_json(p));
    return kSuccess;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hermitian representations of polynomial C-algebras via their dynamical maps", "replab"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--tol", g.tol, "Verification / decomposition tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "RNG seed for the seeded orbit search")->capture_default_str();
    app.add_option("--out", g.out, "Write the data output to this file instead of stdout");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::function<int(const Context&)> action;

    OrbitsConfig orbits;
    auto* c_orbits = app.add_subcommand("orbits", "Periodic orbits of the dynamical map");
    c_orbits->add_option("--algebra", orbits.algebra, "Algebra JSON file")->required();
    c_orbits->add_option("--period", orbits.period, "Period N")->required()->check(CLI::PositiveNumber);
    c_orbits->add_option("--box", orbits.box, "Search box d_min,d_max,dt_min,dt_max")->delimiter(',')->expected(4);
    c_orbits->add_option("--seeds", orbits.seeds, "Newton seeds")->check(CLI::PositiveNumber)->capture_default_str();
    c_orbits->add_flag("--analytic", orbits.analytic, "Closed-form classification (order-1 algebras)");
    c_orbits->callback([&] { action = [&](const Context& ctx) { return cmd_orbits(ctx, orbits); }; });

    StringsConfig strings;
    auto* c_strings = app.add_subcommand("strings", "N-strings from (a, 0) to (0, b)");
    c_strings->add_option("--algebra", strings.algebra, "Algebra JSON file")->required();
    c_strings->add_option("--length", strings.length, "String length N")->required()->check(CLI::PositiveNumber);
    c_strings->add_option("--amax", strings.amax, "Upper end of the scanned a range")->capture_default_str();
    c_strings->add_option("--grid", strings.grid, "Scan resolution")->check(CLI::Range(2, 100000000))->capture_default_str();
    c_strings->callback([&] { action = [&](const Context& ctx) { return cmd_strings(ctx, strings); }; });

    BuildConfig build;
    auto* c_build = app.add_subcommand("build-rep", "Canonical loop or string representation of an orbit record");
    c_build->add_option("--orbit", build.orbit, "Orbit/string record file")->required();
    c_build->add_option("--algebra", build.algebra, "Algebra JSON file (default: the record's algebra)");
    c_build->add_option("--index", build.index, "Record index within an array file")->capture_default_str();
    c_build->add_option("--phase", build.phase, "Loop phase in radians")->capture_default_str();
    c_build->callback([&] { action = [&](const Context& ctx) { return cmd_build(ctx, build); }; });

    RepConfig verify;
    auto* c_verify = app.add_subcommand("verify", "Relation residuals of a representation");
    c_verify->add_option("--rep", verify.rep, "Representation JSON file")->required();
    c_verify->add_option("--algebra", verify.algebra, "Algebra JSON file")->required();
    c_verify->callback([&] { action = [&](const Context& ctx) { return cmd_verify(ctx, verify); }; });

    RepConfig decomp;
    auto* c_decomp = app.add_subcommand("decompose", "Split a representation into irreducible blocks");
    c_decomp->add_option("--rep", decomp.rep, "Representation JSON file")->required();
    c_decomp->add_option("--algebra", decomp.algebra, "Algebra JSON file")->required();
    c_decomp->callback([&] { action = [&](const Context& ctx) { return cmd_decompose(ctx, decomp); }; });

    HenonConfig henon;
    auto* c_henon = app.add_subcommand("henon", "Henon pipeline: census, loop reps per dimension, verification");
    c_henon->add_option("--a", henon.a)->capture_default_str();
    c_henon->add_option("--b", henon.b)->capture_default_str();
    c_henon->add_option("--r", henon.r)->capture_default_str();
    c_henon->add_option("--max-dim", henon.max_dim, "Largest dimension")->check(CLI::PositiveNumber)->capture_default_str();
    c_henon->add_option("--seeds", henon.seeds, "Newton seeds per period")->check(CLI::PositiveNumber)->capture_default_str();
    c_henon->add_option("--census-out", henon.census_out, "Write the orbit census as CSV");
    c_henon->add_option("--reps-out", henon.reps_out, "Write every verified representation as a JSON array");
    c_henon->add_option("--algebra-out", henon.algebra_out, "Write the preset algebra as JSON");
    c_henon->callback([&] { action = [&](const Context& ctx) { return cmd_henon(ctx, henon); }; });

    SurfaceConfig surface;
    auto* c_surface = app.add_subcommand("from-surface", "Algebra parameters from surface data");
    c_surface->add_option("--hbar", surface.hbar)->required();
    c_surface->add_option("--alpha0", surface.alpha0)->required();
    c_surface->add_option("--beta-tilde", surface.beta_tilde)->required()->delimiter(',');
    c_surface->add_option("--gamma-tilde", surface.gamma_tilde)->required()->delimiter(',');
    c_surface->callback([&] { action = [&](const Context& ctx) { return cmd_from_surface(ctx, surface); }; });

    ThetaConfig theta;
    auto* c_theta = app.add_subcommand("theta", "First-order algebra with rotation angle k pi / n");
    c_theta->add_option("--n", theta.n)->required();
    c_theta->add_option("--k", theta.k)->capture_default_str();
    c_theta->add_option("--alpha", theta.alpha)->capture_default_str();
    c_theta->callback([&] { action = [&](const Context& ctx) { return cmd_theta(ctx, theta); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    const Context ctx{g, out, err};
    try {
        return action(ctx);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"replab"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace replab::cli
