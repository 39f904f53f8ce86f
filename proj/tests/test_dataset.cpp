#include "ccmkit/dataset.hpp"
#include "ccmkit/error.hpp"
#include "ccmkit/synthgen.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace ccmkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "ccmkit_test_dataset";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const auto p = scratch(name);
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

void check_same(const MultivariateDataset& a, const MultivariateDataset& b) {
    REQUIRE(a.names() == b.names());
    REQUIRE(a.rows() == b.rows());
    for (std::size_t s = 0; s < a.series_count(); ++s) {
        for (std::size_t t = 0; t < a.rows(); ++t) {
            CHECK(std::fabs(a.series()[s].values[t] - b.series()[s].values[t]) <= 1e-12);
        }
    }
}

} // namespace

TEST_SUITE("dataset") {

TEST_CASE("load a small dated file") {
    const auto p = write_file("ok.csv", "date,t2m,sd\n1979-01-01,250.5,0.3\n1979-02-01,251.0,0.31\n1979-03-01,252.25,0.33\n");
    LoadReport rep;
    const auto d = load_csv(p, "date", {}, &rep);
    CHECK(d.series_count() == 2);
    CHECK(d.rows() == 3);
    CHECK(d.column("t2m").values[2] == 252.25);
    CHECK(rep.dropped.empty());
    CHECK(rep.raw_rows == 3);
    CHECK(rep.warnings.empty());
}

TEST_CASE("rows with a blank cell are dropped and logged") {
    const auto p = write_file("gap.csv", "date,t2m,sd\n1979-01-01,250.5,0.3\n1979-02-01,,0.31\n1979-03-01,252.25,0.33\n");
    LoadReport rep;
    const auto d = load_csv(p, "date", {}, &rep);
    CHECK(d.rows() == 2);
    REQUIRE(rep.dropped.size() == 1);
    CHECK(rep.dropped[0].row == 2);
    CHECK(rep.dropped.size() + d.rows() == rep.raw_rows);
    // Months are not equally many days apart; plain integer gaps are checked too.
    const auto q = write_file("uneven.csv", "t,x\n1,0.1\n2,0.2\n4,0.3\n5,0.4\n");
    LoadReport rq;
    load_csv(q, "", {}, &rq);
    CHECK(rq.warnings.size() == 1);
}

TEST_CASE("empty, headerless and malformed inputs") {
    CHECK_THROWS_AS(load_csv(write_file("empty.csv", "")), Error);
    try {
        load_csv(write_file("empty2.csv", ""));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("zero usable rows") != std::string::npos);
    }
    CHECK_THROWS_AS(load_csv(write_file("onlyhdr.csv", "t,x\n")), Error);
    CHECK_THROWS_AS(load_csv(scratch("missing.csv")), Error);
    CHECK_THROWS_AS(load_csv(write_file("t.csv", "t,x\n1,2\n"), "time"), Error);
    CHECK_THROWS_AS(load_csv(write_file("dec.csv", "t,x\n2,1\n1,2\n")), Error);
}

TEST_CASE("column lookup is exact") {
    const auto d = MultivariateDataset::from_columns({"t2m", "sd"}, {{1, 2, 3}, {4, 5, 6}});
    CHECK(d.column("t2m").values[1] == 2.0);
    try {
        d.column("T2M");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_column);
        CHECK(std::string(e.what()).find("t2m") != std::string::npos);
    }
    const MultivariateDataset empty;
    CHECK_THROWS_AS(empty.column("x"), Error);
}

TEST_CASE("dataset invariants are enforced") {
    CHECK_THROWS_AS(MultivariateDataset::from_columns({"a", "a"}, {{1, 2}, {3, 4}}), Error);
    CHECK_THROWS_AS(MultivariateDataset::from_columns({"a", "b"}, {{1, 2}, {3}}), Error);
    CHECK_THROWS_AS(MultivariateDataset::from_columns({""}, {{1, 2}}), Error);
}

TEST_CASE("write then load round trips") {
    const auto d = MultivariateDataset::from_columns({"x", "y, with comma"},
                                                     {{0.1, -2.5e-17, 3.0, 1.0 / 3.0, 7e300}, {1, 2, 3, 4, 5}});
    const auto p = scratch("rt.csv");
    write_csv(d, p);
    check_same(d, load_csv(p));
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x,\"y, with comma\"");

    SynthConfig cfg;
    cfg.n_observations = 1000;
    cfg.rng_seed = 11;
    const auto synth = generate(cfg);
    const auto sp = scratch("synth.csv");
    write_csv(synth, sp);
    check_same(synth, load_csv(sp));
}

TEST_CASE("csv parsing rules") {
    const auto rows = parse_csv("\xEF\xBB\xBF" "a,\"b \"\"q\"\"\",c\r\n1,\"multi\nline\",3\n\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "a");
    CHECK(rows[0][1] == "b \"q\"");
    CHECK(rows[1][1] == "multi\nline");
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a\"b") == "\"a\"\"b\"");
}

TEST_CASE("column selection") {
    const auto p = write_file("sel.csv", "t,a,b,c\n1,1,x,3\n2,2,y,4\n");
    const auto d = load_csv(p, "t", {"a", "c"});
    CHECK(d.names() == std::vector<std::string>{"a", "c"});
    CHECK(d.rows() == 2);
    CHECK_THROWS_AS(load_csv(p, "t", {"zz"}), Error);
}

} // TEST_SUITE
