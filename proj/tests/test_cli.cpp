#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "replab/cli.hpp"
#include "replab/io.hpp"
#include "test_support.hpp"

using namespace replab;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("replab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
        io::write_file(path("firstorder_n3.json"), io::algebra_to_json(theta_params(3, 1, 1.0)));
        io::write_file(path("firstorder_a1.json"), io::algebra_to_json(AlgebraParams(1.0, {-1.0}, {-1.0})));
        io::write_file(path("henon.json"), io::algebra_to_json(henon_preset(5.0, 0.3, 3.0)));
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

} // namespace

TEST_F(Cli, OrbitsHenonPeriodThree) {
    ASSERT_EQ(run({"orbits", "--algebra", path("henon.json"), "--period", "3", "--box", "0,10,0,10", "--seeds",
                   "4096", "--out", path("o3.json")}),
              cli::kSuccess);
    const auto records = io::orbit_records_from_json(io::read_file(path("o3.json")));
    ASSERT_EQ(records.size(), 2u);  // (2^3 - 2) / 3
    for (const auto& r : records) {
        EXPECT_EQ(r.points.size(), 3u);
        EXPECT_TRUE(is_valid_orbit(henon_preset(5.0, 0.3, 3.0), PeriodicOrbit{r.points}));
    }
    EXPECT_NE(err_.str().find("orbits in the open quadrant: 2"), std::string::npos);
}

TEST_F(Cli, OrbitsDegenerateMapAdvisesAnalytic) {
    EXPECT_EQ(run({"orbits", "--algebra", path("firstorder_n3.json"), "--period", "3"}), cli::kAdvisory);
    EXPECT_NE(err_.str().find("--analytic"), std::string::npos);
    EXPECT_TRUE(out_.str().empty());
}

TEST_F(Cli, OrbitsAnalyticSamples) {
    ASSERT_EQ(run({"orbits", "--algebra", path("firstorder_n3.json"), "--period", "3", "--analytic"}),
              cli::kSuccess);
    const auto records = io::orbit_records_from_json(out_.str());
    EXPECT_EQ(records.size(), 3u);
    EXPECT_NE(err_.str().find("theta            1 pi / 3"), std::string::npos);
}

TEST_F(Cli, MissingAlgebraFile) {
    EXPECT_EQ(run({"orbits", "--algebra", path("missing.json"), "--period", "3"}), cli::kInputError);
    EXPECT_NE(err_.str().find("cannot open"), std::string::npos);
}

TEST_F(Cli, InvalidAlgebraFile) {
    io::write_file(path("bad.json"), "{\"alpha\":1,\"beta\":[0],\"gamma\":[0]}");
    EXPECT_EQ(run({"orbits", "--algebra", path("bad.json"), "--period", "1"}), cli::kInputError);
    io::write_file(path("junk.json"), "not json");
    EXPECT_EQ(run({"strings", "--algebra", path("junk.json"), "--length", "2"}), cli::kInputError);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}), cli::kInputError);
    EXPECT_EQ(run({"bogus"}), cli::kInputError);
    EXPECT_EQ(run({"orbits", "--period", "3"}), cli::kInputError);
    EXPECT_EQ(run({"--format", "xml", "theta", "--n", "5"}), cli::kInputError);
    EXPECT_EQ(run({"--help"}), cli::kSuccess);
}

TEST_F(Cli, Strings) {
    ASSERT_EQ(run({"strings", "--algebra", path("firstorder_a1.json"), "--length", "2", "--amax", "10"}),
              cli::kSuccess);
    auto records = io::orbit_records_from_json(out_.str());
    ASSERT_EQ(records.size(), 1u);
    EXPECT_NEAR(records[0].points[0].d, 1.0, 1e-12);
    EXPECT_NE(err_.str().find("a = 1"), std::string::npos);

    ASSERT_EQ(run({"strings", "--algebra", path("firstorder_a1.json"), "--length", "1"}), cli::kSuccess);
    records = io::orbit_records_from_json(out_.str());
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].points, (std::vector<PlanePoint>{{0.0, 0.0}}));

    ASSERT_EQ(run({"strings", "--algebra", path("firstorder_a1.json"), "--length", "2", "--amax", "0.5"}),
              cli::kSuccess);
    EXPECT_TRUE(io::orbit_records_from_json(out_.str()).empty());
}

TEST_F(Cli, BuildAndVerify) {
    ASSERT_EQ(run({"orbits", "--algebra", path("firstorder_n3.json"), "--period", "3", "--analytic", "--out",
                   path("orbits.json")}),
              cli::kSuccess);
    ASSERT_EQ(run({"build-rep", "--orbit", path("orbits.json"), "--phase", "1.5", "--out", path("loop3.json")}),
              cli::kSuccess);
    const auto rep = io::representation_from_json(io::read_file(path("loop3.json")));
    EXPECT_EQ(rep.dim(), 3u);
    EXPECT_EQ(rep.kind, RepKind::loop);
    EXPECT_DOUBLE_EQ(rep.phase, 1.5);

    ASSERT_EQ(run({"verify", "--rep", path("loop3.json"), "--algebra", path("firstorder_n3.json")}), cli::kSuccess);
    EXPECT_NE(out_.str().find("\"pass\":true"), std::string::npos);
    const auto r = relation_residual(theta_params(3, 1, 1.0), rep.W);
    EXPECT_LT(r.max(), 1e-9);

    // Wrong algebra: verification failure.
    EXPECT_EQ(run({"verify", "--rep", path("loop3.json"), "--algebra", path("henon.json")}),
              cli::kVerificationFailed);
    EXPECT_NE(out_.str().find("\"pass\":false"), std::string::npos);

    EXPECT_EQ(run({"build-rep", "--orbit", path("orbits.json"), "--index", "9"}), cli::kInputError);
    EXPECT_EQ(run({"build-rep", "--orbit", path("orbits.json"), "--algebra", path("henon.json")}), cli::kInputError);
}

TEST_F(Cli, DecomposeMixedRepresentation) {
    const auto p = henon_preset(5.0, 0.3, 3.0);
    const auto o3 = find_periodic_orbits(p, 3, {0, 6, 0, 6}).orbits;
    const auto s3 = find_strings(p, 3, 6.0);
    ASSERT_FALSE(o3.empty());
    ASSERT_FALSE(s3.empty());
    const auto sum = direct_sum({build_loop_rep(p, o3[0], 2.5), build_string_rep(p, s3[0])});
    std::mt19937_64 rng(4);
    const CMatrix Q = oracle::haar_unitary(6, rng);
    Representation mixed;
    mixed.W = Q * sum.W * Q.adjoint();
    io::write_file(path("mixed.json"), io::representation_to_json(mixed));

    ASSERT_EQ(run({"decompose", "--rep", path("mixed.json"), "--algebra", path("henon.json"), "--out",
                   path("d1.json")}),
              cli::kSuccess);
    const std::string first = io::read_file(path("d1.json"));
    EXPECT_NE(first.find("\"dim\":3,\"kind\":\"loop\""), std::string::npos);
    EXPECT_NE(first.find("\"dim\":3,\"kind\":\"string\""), std::string::npos);
    ASSERT_EQ(run({"decompose", "--rep", path("mixed.json"), "--algebra", path("henon.json"), "--out",
                   path("d2.json")}),
              cli::kSuccess);
    EXPECT_EQ(io::read_file(path("d2.json")), first);
}

TEST_F(Cli, DecomposeRejectsNonRepresentation) {
    io::write_file(path("rand.json"), "{\"dim\":2,\"w_re\":[[1,2],[0,1]]}");
    EXPECT_EQ(run({"decompose", "--rep", path("rand.json"), "--algebra", path("henon.json")}), cli::kInputError);
}

TEST_F(Cli, HenonCoverage) {
    ASSERT_EQ(run({"henon", "--a", "5", "--b", "0.3", "--r", "3", "--max-dim", "8", "--census-out",
                   path("census.csv"), "--algebra-out", path("alg.json")}),
              cli::kSuccess);
    EXPECT_NE(out_.str().find("\"complete\":true"), std::string::npos);
    const std::string csv = io::read_file(path("census.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "period,points_found,minimal_orbits");
    EXPECT_NE(csv.find("\n8,256,30\n"), std::string::npos);
    EXPECT_EQ(io::algebra_from_json(io::read_file(path("alg.json"))), henon_preset(5.0, 0.3, 3.0));

    const std::string first = out_.str();
    ASSERT_EQ(run({"henon", "--max-dim", "8", "--census-out", path("census.csv")}), cli::kSuccess);
    EXPECT_EQ(out_.str(), first);

    ASSERT_EQ(run({"--format", "csv", "henon", "--max-dim", "3"}), cli::kSuccess);
    EXPECT_EQ(out_.str().substr(0, out_.str().find('\n')), "dim,loop_reps,verified,inequivalent,max_residual");
}

TEST_F(Cli, HenonThreadCountDoesNotChangeOutput) {
    ASSERT_EQ(run({"henon", "--max-dim", "7"}), cli::kSuccess);
    const std::string serial = out_.str();
    ::setenv("REP_LAB_THREADS", "3", 1);
    ASSERT_EQ(run({"henon", "--max-dim", "7"}), cli::kSuccess);
    ::unsetenv("REP_LAB_THREADS");
    EXPECT_EQ(out_.str(), serial);
}

TEST_F(Cli, ThetaAndFromSurface) {
    ASSERT_EQ(run({"theta", "--n", "5", "--k", "2", "--alpha", "1"}), cli::kSuccess);
    EXPECT_EQ(io::algebra_from_json(out_.str()), theta_params(5, 2, 1.0));
    EXPECT_EQ(run({"theta", "--n", "6", "--k", "2"}), cli::kInputError);
    EXPECT_EQ(run({"theta", "--n", "4", "--k", "2"}), cli::kInputError);

    ASSERT_EQ(run({"from-surface", "--hbar", "0.5", "--alpha0", "1", "--beta-tilde", "0.2,0", "--gamma-tilde",
                   "1,-0.5"}),
              cli::kSuccess);
    EXPECT_EQ(io::algebra_from_json(out_.str()), from_surface({0.5, 1.0, {0.2, 0.0}, {1.0, -0.5}}));
    EXPECT_EQ(run({"from-surface", "--hbar", "0", "--alpha0", "1", "--beta-tilde", "1", "--gamma-tilde", "1"}),
              cli::kInputError);
}
