#include "sqzsync/error.hpp"
#include "sqzsync/io.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace sqzsync;

namespace {

double random_double(std::mt19937_64& rng) {
    // any finite bit pattern
    for (;;) {
        const double v = std::bit_cast<double>(rng());
        if (std::isfinite(v)) return v;
    }
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += (c == '\n');
    return n;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("CSV round trip is bit exact") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        ResultEnvelope env;
        env.meta["tool"] = "sqzsync";
        env.meta["params"]["n"] = random_double(rng);
        env.meta["params"]["r"] = 1.5;
        const std::size_t ncol = 1 + rng() % 5;
        const std::size_t nrow = rng() % 40;
        for (std::size_t c = 0; c < ncol; ++c) env.data.columns.push_back("c" + std::to_string(c));
        for (std::size_t r = 0; r < nrow; ++r) {
            std::vector<Cell> row;
            for (std::size_t c = 0; c < ncol; ++c) {
                double v = random_double(rng);
                if (rng() % 4 == 0) v = -0.0;
                row.push_back(v);
            }
            env.data.rows.push_back(std::move(row));
        }
        const ResultEnvelope back = parse_csv(to_csv(env));
        CHECK(back.meta == env.meta);
        REQUIRE(back.data.columns == env.data.columns);
        REQUIRE(back.data.rows.size() == env.data.rows.size());
        for (std::size_t r = 0; r < nrow; ++r)
            for (std::size_t c = 0; c < ncol; ++c) {
                const double a = std::get<double>(env.data.rows[r][c]);
                const double b = std::get<double>(back.data.rows[r][c]);
                CHECK(std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b));
            }
    }
}

TEST_CASE("string cells are quoted when needed") {
    ResultEnvelope env;
    env.data.columns = {"module", "detail"};
    env.data.rows.push_back({std::string("bloch"), std::string("a,b \"c\"")});
    const std::string csv = to_csv(env);
    CHECK(csv == "module,detail\nbloch,\"a,b \"\"c\"\"\"\n");
    const ResultEnvelope back = parse_csv(csv);
    CHECK(std::get<std::string>(back.data.rows[0][1]) == "a,b \"c\"");
}

TEST_CASE("meta lines are flattened with dotted keys") {
    ResultEnvelope env;
    env.meta["params"]["n"] = 0.0;
    env.meta["subcommand"] = "steady";
    env.data.columns = {"x"};
    const std::string csv = to_csv(env);
    CHECK(csv == "# params.n=0.0\n# subcommand=\"steady\"\nx\n");
}

TEST_CASE("grid table has one row per cell") {
    SweepGrid g;
    g.kind = "tongue";
    g.x_axis = {"eps", {0.0, 1.0}};
    g.y_axis = {"delta", {-1.0, 1.0}};
    g.values = {0.0, 0.1, 0.2, 0.3};
    ResultEnvelope env;
    env.meta["tool"] = "sqzsync";
    env.meta["subcommand"] = "tongue";
    env.data = grid_table(g);
    CHECK(env.data.columns == std::vector<std::string>{"eps", "delta", "value"});
    const std::string csv = to_csv(env);
    CHECK(count_lines(csv) == 2 + 1 + 4);
    CHECK(csv.find("1,-1,0.1\n") != std::string::npos);
    CHECK(csv.find("1,1,0.3\n") != std::string::npos);
}

TEST_CASE("trajectory table schema") {
    SystemParams p;
    EnsembleOptions opt;
    opt.t_end = 1.0;
    opt.stride = 25;
    const EnsembleRun run = simulate_ensemble(p, sample_initial_states(3, 1), opt);
    const Table t = trajectory_table(run);
    CHECK(t.columns == std::vector<std::string>{"path_id", "t", "theta", "phi", "x", "y"});
    // steps 0, 25, 50, 75, 100 for each path
    CHECK(t.rows.size() == 3 * 5);
    CHECK(std::get<std::int64_t>(t.rows.back()[0]) == 2);
    CHECK(std::get<double>(t.rows.back()[1]) == doctest::Approx(1.0));
}

TEST_CASE("q table schema") {
    const PhaseGrid g = q_grid({0.1, 0.2, -0.3}, 5, 8);
    const Table t = q_table(g);
    CHECK(t.columns == std::vector<std::string>{"theta", "phi", "q"});
    CHECK(t.rows.size() == 40);
}

TEST_CASE("JSON envelope is column oriented") {
    ResultEnvelope env;
    env.meta["tool"] = "sqzsync";
    env.meta["version"] = kVersion;
    env.data.columns = {"a", "b"};
    env.data.rows.push_back({1.5, std::int64_t{3}});
    env.data.rows.push_back({-0.25, std::int64_t{4}});
    const json doc = json::parse(to_json(env));
    CHECK(doc.begin().key() == "meta");
    CHECK(doc["meta"]["version"] == "0.1.0");
    CHECK(doc["data"]["a"] == json::array({1.5, -0.25}));
    CHECK(doc["data"]["b"] == json::array({3, 4}));
}

TEST_CASE("derived meta carries reservoir quantities") {
    SystemParams p;
    p.r = 1.5;
    const json d = derived_meta(p);
    CHECK(d["N"].get<double>() == doctest::Approx(4.533830997888882921).epsilon(1e-14));
    CHECK(d["M_re"].get<double>() == doctest::Approx(-5.008937463704950949).epsilon(1e-14));
    CHECK(d["theta_s"].get<double>() == doctest::Approx(1.670288312472600497).epsilon(1e-14));
    CHECK(d["squeeze_db"].get<double>() == doctest::Approx(13.028834457097555).epsilon(1e-14));
}

TEST_CASE("write_text reports the path on failure") {
    try {
        write_text("/nonexistent-dir/out.csv", "x\n");
        FAIL("expected Io error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
        CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
    }
}

} // TEST_SUITE
