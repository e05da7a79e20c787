#include <doctest.h>

#include "oracles.hpp"
#include "sgboost/boost.hpp"
#include "sgboost/error.hpp"
#include "sgboost/learner_factory.hpp"
#include "sgboost/synth.hpp"

using namespace sgboost;

namespace {

EncodedData synth_encoded(int p, int moderators, int group_size, Index n, std::uint64_t seed) {
    SynthSpec spec;
    spec.n = n;
    spec.schema = make_synth_schema(p, moderators, group_size);
    spec.seed = seed;
    spec.beta_main["x1"] = 1.0;
    return encode(spec.schema, generate(spec).table);
}

double achieved_df(const DesignMatrix& d, const BaseLearner& l) {
    return effective_df(d, l.columns, l.lambda);
}

}  // namespace

TEST_SUITE("sgb-factory") {

TEST_CASE("mb gives one learner per variable at df 1") {
    DatasetSchema s = make_synth_schema(6, 0, 3);
    s.variables[5] = {"region", VariableKind::categorical, {"a", "b", "c", "d"}, "g2", false};
    Table t;
    for (const auto& v : s.variables) t.header.push_back(v.name);
    t.header.push_back("y");
    CounterRng rng(1);
    for (int i = 0; i < 80; ++i) {
        std::vector<std::string> row;
        for (int j = 0; j < 5; ++j) row.push_back(rng.bernoulli(0.5) ? "1" : "0");
        row.push_back(std::string(1, static_cast<char>('a' + rng.below(4))));
        row.push_back(i % 2 ? "1" : "0");
        t.rows.push_back(row);
    }
    const auto e = encode(s, t);
    const auto learners = build_mb(e.design, s);
    REQUIRE(learners.size() == 6);
    CHECK(learners[0].lambda == 0.0);
    CHECK(learners[5].columns.size() == 3);
    CHECK(learners[5].lambda > 0.0);
    CHECK(std::abs(achieved_df(e.design, learners[5]) - 1.0) < 1e-8);
    Eigen::MatrixXd block(e.design.rows(), 3);
    for (Index k = 0; k < 3; ++k) block.col(k) = e.design.values.col(learners[5].columns[static_cast<std::size_t>(k)]);
    CHECK(std::abs(oracle::trace_df(block, learners[5].lambda) - 1.0) < 1e-8);
}

TEST_CASE("alpha 1 leaves individual learners, alpha 0 leaves group learners") {
    const auto e = synth_encoded(8, 0, 4, 200, 2);
    const auto s = make_synth_schema(8, 0, 4);
    SgbSpec spec;
    spec.alpha = 1.0;
    const auto ind = build_sgb(e.design, s, spec);
    CHECK(ind.size() == 8);
    for (const auto& l : ind) CHECK(l.kind == LearnerKind::individual);
    spec.alpha = 0.0;
    const auto grp = build_sgb(e.design, s, spec);
    CHECK(grp.size() == 2);
    for (const auto& l : grp) CHECK(l.kind == LearnerKind::group);
}

TEST_CASE("alpha 0.5 with a group of four: every target is 0.125") {
    const auto e = synth_encoded(4, 0, 4, 300, 3);
    const auto s = make_synth_schema(4, 0, 4);
    SgbSpec spec;
    spec.alpha = 0.5;
    const auto learners = build_sgb(e.design, s, spec);
    REQUIRE(learners.size() == 5);
    for (const auto& l : learners) {
        CHECK(l.df_target == 0.125);
        CHECK(std::abs(achieved_df(e.design, l) - 0.125) < 1e-8);
    }
    CHECK(learners[4].id == "group:g1");
    CHECK(learners[4].columns.size() == 4);
}

TEST_CASE("per-group df sums follow the mixing formulas") {
    const auto e = synth_encoded(10, 0, 3, 300, 4);
    const auto s = make_synth_schema(10, 0, 3);
    SgbSpec spec;
    spec.alpha = 0.3;
    const auto learners = build_sgb(e.design, s, spec);
    for (const auto& g : column_group_index(s, e.design)) {
        const double p_g = static_cast<double>(g.variables.size());
        double individual = 0.0;
        for (const auto& l : learners) {
            if (l.kind == LearnerKind::individual &&
                std::find(g.variables.begin(), g.variables.end(), l.id) != g.variables.end()) {
                individual += achieved_df(e.design, l);
            }
            if (l.id == group_learner_id(g.group)) {
                CHECK(std::abs(achieved_df(e.design, l) - 0.7 / p_g) < 1e-8);
            }
        }
        CHECK(std::abs(individual - 0.3) < 1e-7);
    }
}

TEST_CASE("sgb validates alpha") {
    SgbSpec spec;
    spec.alpha = 1.5;
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("interaction learners: constant product terms are dropped") {
    const auto s = oracle::binary_schema({"m", "a", "b"}, {"m"});
    Table t;
    t.header = {"m", "a", "b", "y"};
    // m and b are never both 1, so m:b is the zero column
    const char* rows[][4] = {{"0", "0", "0", "0"}, {"0", "1", "1", "1"}, {"1", "0", "0", "0"},
                             {"1", "1", "0", "1"}, {"0", "1", "1", "0"}, {"1", "1", "0", "1"}};
    for (auto& r : rows) t.rows.push_back({r[0], r[1], r[2], r[3]});
    const auto e = encode(s, t);
    const auto terms = expand_interactions(s, e.design);
    const auto d = append_interactions(e.design, terms);
    const auto il = build_interaction_learners(d, terms);
    REQUIRE(il.dropped.size() == 1);
    CHECK(il.dropped[0] == "m:b");
    REQUIRE(il.learners.size() == 1);
    CHECK(il.learners[0].id == "m:a");
    CHECK(il.learners[0].kind == LearnerKind::interaction);
    CHECK(il.learners[0].lambda == 0.0);
}

TEST_CASE("planted interaction term is present among the interaction learners") {
    SynthSpec spec;
    spec.n = 500;
    spec.schema = make_synth_schema(6, 2, 3);
    spec.beta_interaction.push_back({"x1", "x4", 2.5});
    const auto e = encode(spec.schema, generate(spec).table);
    const auto terms = expand_interactions(spec.schema, e.design);
    const auto d = append_interactions(e.design, terms);
    const auto il = build_interaction_learners(d, terms);
    CHECK(il.learners.size() == terms.size());
    CHECK(std::any_of(il.learners.begin(), il.learners.end(), [](const BaseLearner& l) { return l.id == "x1:x4"; }));
}

TEST_CASE("sgb at alpha 1 with df_base p_g matches mb's selection path") {
    const auto e = synth_encoded(8, 0, 4, 300, 6);
    const auto s = make_synth_schema(8, 0, 4);
    SgbSpec spec;
    spec.alpha = 1.0;
    spec.df_base = 4.0;
    const auto a = build_sgb(e.design, s, spec);
    const auto b = build_mb(e.design, s);
    BoostConfig c;
    c.m_stop = 100;
    const auto fa = boost(e.design, e.outcome, a, c);
    const auto fb = boost(e.design, e.outcome, b, c);
    REQUIRE(fa.path.size() == fb.path.size());
    for (std::size_t k = 0; k < fa.path.size(); ++k) CHECK(fa.path[k].learner_id == fb.path[k].learner_id);
}

}
