#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "sgboost/data_model.hpp"
#include "sgboost/error.hpp"
#include "sgboost/table.hpp"

using namespace sgboost;

namespace {

Table csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

DatasetSchema region_schema() {
    DatasetSchema s;
    s.outcome.name = "y";
    s.variables.push_back({"Natural assets",
                           VariableKind::categorical,
                           {"CentralChile", "CentralTunisia", "NorthernTunisia", "SouthernChile"},
                           "Natural",
                           true});
    s.variables.push_back({"b", VariableKind::binary, {"no", "yes"}, "B", false});
    s.variables.push_back({"t", VariableKind::continuous, {}, "T", false});
    return s;
}

}  // namespace

TEST_SUITE("data-model") {

TEST_CASE("csv parsing handles quotes, CRLF, BOM and blank lines") {
    const auto t = csv("\xEF\xBB\xBF" "a,\"b,c\",d\r\n1,\"x \"\"q\"\"\",3\r\n\r\n4,5,6\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b,c", "d"});
    REQUIRE(t.row_count() == 2);
    CHECK(t.rows[0][1] == "x \"q\"");
    CHECK(t.rows[1][2] == "6");
    CHECK(code_of([] { csv("a,b\n1\n"); }) == ErrorCode::Parse);
    std::ostringstream out;
    write_csv(out, t);
    std::istringstream back(out.str());
    const auto t2 = parse_csv(back);
    CHECK(t2.header == t.header);
    CHECK(t2.rows == t.rows);
}

TEST_CASE("four-region variable gives three reference-coded columns") {
    const auto schema = region_schema();
    const auto t = csv(
        "Natural assets,b,t,y\n"
        "CentralChile,no,1.5,1\n"
        "CentralTunisia,yes,2,0\n"
        "NorthernTunisia,no,-1,1\n"
        "SouthernChile,yes,0.25,0\n");
    const auto e = encode(schema, t);
    REQUIRE(e.design.cols() == 5);
    CHECK(e.design.term_columns("Natural assets").size() == 3);
    CHECK(e.design.columns[0].name == "Natural assets=CentralTunisia");
    CHECK(e.design.columns[2].name == "Natural assets=SouthernChile");
    CHECK(e.design.columns[3].name == "b=yes");
    CHECK(e.design.columns[4].name == "t");
    for (Index j = 0; j < e.design.cols(); ++j) {
        CHECK(std::abs(e.design.values.col(j).mean()) < 1e-15);
    }
    // un-centering reproduces raw values exactly
    CHECK(e.design.raw_column(4)(0) == 1.5);
    CHECK(e.design.raw_column(4)(3) == 0.25);
    CHECK(e.design.raw_column(2)(3) == 1.0);
    CHECK(e.design.raw_column(2)(0) == 0.0);
    CHECK(e.outcome.positives() == 2);
}

TEST_CASE("two binary predictors on four rows centre to plus or minus one half") {
    const auto schema = oracle::binary_schema({"a", "b"});
    const auto e = encode(schema, csv("a,b,y\n0,0,0\n0,1,1\n1,0,0\n1,1,1\n"));
    REQUIRE(e.design.cols() == 2);
    CHECK(e.design.values.cwiseAbs().isApproxToConstant(0.5));
}

TEST_CASE("encoding errors") {
    const auto schema = oracle::binary_schema({"a", "b"});
    CHECK(code_of([&] { encode(schema, csv("a,b,y\n1,0,0\n1,1,1\n")); }) == ErrorCode::DegenerateColumn);
    CHECK(code_of([&] { encode(schema, csv("a,y\n1,0\n0,1\n")); }) == ErrorCode::MissingColumn);
    CHECK(code_of([&] { encode(schema, csv("a,b,y\n2,0,0\n0,1,1\n")); }) == ErrorCode::UnknownCategory);
    CHECK(code_of([&] { encode(schema, csv("a,b,y\n1,0,2\n0,1,1\n")); }) == ErrorCode::NonBinaryOutcome);
    CHECK(code_of([&] { encode(schema, csv("a,b,y\n,0,0\n0,1,1\n")); }) == ErrorCode::MissingValue);
    CHECK(code_of([&] { encode(schema, csv("a,b,y\nNA,0,0\n0,1,1\n")); }) == ErrorCode::MissingValue);
}

TEST_CASE("schema validation") {
    auto s = oracle::binary_schema({"a", "b"});
    s.variables[1].name = "a";
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
    s = oracle::binary_schema({"a", "y"});
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
    s = oracle::binary_schema({"a"});
    s.variables[0].categories = {"0", "1", "2"};
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
    s = oracle::binary_schema({"a*b"});
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("encoding is deterministic") {
    const auto schema = region_schema();
    const std::string text =
        "Natural assets,b,t,y\nCentralChile,no,1,1\nSouthernChile,yes,2,0\nCentralTunisia,no,3,1\nNorthernTunisia,yes,4,0\n";
    const auto a = encode(schema, csv(text));
    const auto b = encode(schema, csv(text));
    CHECK((a.design.values.array() == b.design.values.array()).all());
}

TEST_CASE("one moderator and one binary partner give one single-column term") {
    const auto schema = oracle::binary_schema({"m", "b"}, {"m"});
    const auto e = encode(schema, csv("m,b,y\n0,0,0\n0,1,1\n1,0,0\n1,1,1\n1,1,0\n"));
    const auto terms = expand_interactions(schema, e.design);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].id() == "m:b");
    CHECK(terms[0].columns.cols() == 1);
}

TEST_CASE("three-column moderator times two-column partner gives six product columns") {
    DatasetSchema s;
    s.outcome.name = "y";
    s.variables.push_back({"m", VariableKind::categorical, {"a", "b", "c", "d"}, "g", true});
    s.variables.push_back({"p", VariableKind::categorical, {"u", "v", "w"}, "g", false});
    const auto e = encode(s, csv("m,p,y\na,u,0\nb,v,1\nc,w,0\nd,u,1\nb,w,1\nc,v,0\n"));
    const auto terms = expand_interactions(s, e.design);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].columns.cols() == 6);
}

TEST_CASE("product columns equal products of raw parents, then centred") {
    CounterRng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const auto schema = oracle::binary_schema({"a", "b", "c"}, {"a", "b"});
        Table t;
        t.header = {"a", "b", "c", "y"};
        for (int i = 0; i < 30; ++i) {
            t.rows.push_back({rng.bernoulli(0.5) ? "1" : "0", rng.bernoulli(0.4) ? "1" : "0",
                              rng.bernoulli(0.6) ? "1" : "0", i % 2 ? "1" : "0"});
        }
        t.rows[0] = {"1", "1", "1", "1"};
        t.rows[1] = {"0", "0", "0", "0"};
        const auto e = encode(schema, t);
        const auto terms = expand_interactions(schema, e.design);
        REQUIRE(terms.size() == 3);  // a:b, a:c, b:c
        for (const auto& term : terms) {
            const auto raw_m = e.design.raw_column(*e.design.find(term.moderator + "=1"));
            const auto raw_p = e.design.raw_column(*e.design.find(term.partner + "=1"));
            const Eigen::VectorXd prod = raw_m.cwiseProduct(raw_p);
            const Eigen::VectorXd centred = prod.array() - prod.mean();
            CHECK((term.columns.col(0) - centred).cwiseAbs().maxCoeff() < 1e-15);
            CHECK(term.meta[0].center == doctest::Approx(prod.mean()).epsilon(1e-15));
        }
    }
}

TEST_CASE("73 predictors with 22 moderators: term count equals exhaustive pair count") {
    DatasetSchema s;
    s.outcome.name = "y";
    for (int j = 0; j < 73; ++j) {
        s.variables.push_back({"v" + std::to_string(j), VariableKind::binary, {"0", "1"},
                               "g" + std::to_string(j / 4), j % 3 == 0 && j < 66});
    }
    REQUIRE(s.moderator_count() == 22);
    Table t;
    for (const auto& v : s.variables) t.header.push_back(v.name);
    t.header.push_back("y");
    CounterRng rng(5);
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> row;
        for (int j = 0; j < 73; ++j) row.push_back(rng.bernoulli(0.5) ? "1" : "0");
        row.push_back(i % 2 ? "1" : "0");
        t.rows.push_back(row);
    }
    const auto e = encode(s, t);
    const auto terms = expand_interactions(s, e.design);
    CHECK(terms.size() == oracle::interaction_pair_count(s));
    CHECK(terms.size() == 22 * 72 - 22 * 21 / 2);
}

TEST_CASE("expand_interactions without moderators is rejected") {
    const auto schema = oracle::binary_schema({"a", "b"});
    const auto e = encode(schema, csv("a,b,y\n0,0,0\n0,1,1\n1,0,0\n1,1,1\n"));
    CHECK(code_of([&] { expand_interactions(schema, e.design); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("group index partitions the columns") {
    DatasetSchema s;
    s.outcome.name = "y";
    for (const char* n : {"Increasing temperature", "Decreasing rain", "Increasing drought",
                          "Increasing extreme weather"}) {
        s.variables.push_back({n, VariableKind::binary, {"no", "yes"}, "Climate experience", false});
    }
    s.variables.push_back({"Alone", VariableKind::binary, {"no", "yes"}, "Single", false});
    s.variables.push_back({"Region", VariableKind::categorical, {"a", "b", "c"}, "Place", false});
    Table t;
    for (const auto& v : s.variables) t.header.push_back(v.name);
    t.header.push_back("y");
    CounterRng rng(3);
    for (int i = 0; i < 30; ++i) {
        std::vector<std::string> row;
        for (int j = 0; j < 5; ++j) row.push_back(i < 2 ? (i ? "yes" : "no") : (rng.bernoulli(0.5) ? "yes" : "no"));
        row.push_back(std::string(1, static_cast<char>('a' + i % 3)));
        row.push_back(i % 2 ? "1" : "0");
        t.rows.push_back(row);
    }
    const auto e = encode(s, t);
    const auto groups = column_group_index(s, e.design);
    REQUIRE(groups.size() == 3);
    CHECK(groups[0].columns.size() == 4);
    CHECK(groups[1].columns.size() == 1);
    std::vector<Index> all;
    for (const auto& g : groups) all.insert(all.end(), g.columns.begin(), g.columns.end());
    std::sort(all.begin(), all.end());
    REQUIRE(static_cast<Index>(all.size()) == e.design.cols());
    for (Index j = 0; j < e.design.cols(); ++j) CHECK(all[static_cast<std::size_t>(j)] == j);
}

TEST_CASE("subset re-centres while keeping raw values") {
    const auto schema = oracle::binary_schema({"a", "b"});
    const auto e = encode(schema, csv("a,b,y\n0,0,0\n0,1,1\n1,0,0\n1,1,1\n1,1,0\n"));
    const std::vector<Index> rows{4, 0, 2};
    const auto sub = e.design.subset(rows);
    for (Index j = 0; j < sub.cols(); ++j) {
        CHECK(std::abs(sub.values.col(j).mean()) < 1e-15);
        for (Index i = 0; i < 3; ++i) {
            CHECK(sub.raw_column(j)(i) == doctest::Approx(e.design.raw_column(j)(rows[static_cast<std::size_t>(i)])));
        }
    }
}

}
