#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sgboost/error.hpp"
#include "sgboost/interpret.hpp"
#include "sgboost/learner_factory.hpp"
#include "sgboost/logistic.hpp"
#include "sgboost/synth.hpp"

using namespace sgboost;

namespace {

struct Fitted {
    DatasetSchema schema;
    EncodedData data;
    BoostFit fit;
};

Fitted fitted(int m_stop, std::uint64_t seed = 1) {
    Fitted f;
    SynthSpec spec;
    spec.n = 300;
    spec.schema = make_synth_schema(6, 0, 3);
    spec.seed = seed;
    spec.beta_main["x1"] = 1.5;
    spec.beta_main["x2"] = -1.0;
    f.schema = spec.schema;
    f.data = encode(spec.schema, generate(spec).table);
    BoostConfig c;
    c.m_stop = m_stop;
    f.fit = boost(f.data.design, f.data.outcome, build_mb(f.data.design, f.schema), c);
    return f;
}

Table csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

}  // namespace

TEST_SUITE("interpret") {

TEST_CASE("importance of an empty fit is empty") {
    CHECK(importance(fitted(0).fit).rows.empty());
}

TEST_CASE("single learner gets all the importance") {
    const auto f = fitted(0);
    BoostConfig c;
    c.m_stop = 30;
    const std::vector<BaseLearner> one{make_learner(f.data.design, "x1", {0}, 1.0, LearnerKind::individual)};
    const auto fit = boost(f.data.design, f.data.outcome, one, c);
    const auto t = importance(fit);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].relative == 1.0);
}

TEST_CASE("importance telescopes to the total risk drop") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto f = fitted(150, seed);
        const auto t = importance(f.fit);
        double sum = 0.0;
        double rel = 0.0;
        for (const auto& r : t.rows) {
            sum += r.absolute;
            rel += r.relative;
            CHECK(r.absolute >= -1e-12);
            if (!f.fit.find(r.learner_id)->selected()) CHECK(r.relative == 0.0);
        }
        const double drop = f.fit.initial_risk - f.fit.path.back().risk_after;
        CHECK(std::abs(sum - drop) < 1e-10);
        CHECK(std::abs(rel - 1.0) < 1e-10);
    }
}

TEST_CASE("odds ratios") {
    const auto f = fitted(100);
    const auto rows = odds_ratios(f.fit);
    for (const auto& r : rows) {
        CHECK(r.odds_ratio == doctest::Approx(std::exp(r.coefficient)).epsilon(1e-15));
        if (r.coefficient == 0.0) CHECK(r.odds_ratio == 1.0);
    }
    BoostFit manual;
    manual.learners.push_back({"b", LearnerKind::individual, 0, {"b=1"}, {0.5}, Eigen::VectorXd::Constant(1, 0.6931)});
    CHECK(odds_ratios(manual)[0].odds_ratio == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("odds ratio of a converged single-learner fit matches the MLE") {
    SynthSpec spec;
    spec.n = 200;
    spec.schema = make_synth_schema(1, 0, 1);
    spec.beta_main["x1"] = 1.0;
    spec.intercept = -0.4;
    const auto e = encode(spec.schema, generate(spec).table);
    BoostConfig c;
    c.m_stop = 5000;
    const auto fit = boost(e.design, e.outcome, build_mb(e.design, spec.schema), c);
    Eigen::MatrixXd x(e.design.rows(), 2);
    x.col(0).setOnes();
    x.col(1) = e.design.raw_column(0);
    const auto beta = oracle::newton_logistic(x, e.outcome.labels);
    const double ours = odds_ratios(fit)[0].odds_ratio;
    CHECK(std::abs(ours / std::exp(beta(1)) - 1.0) < 1e-2);
}

TEST_CASE("partial effects") {
    const auto f = fitted(120);
    const auto& d = f.data.design;
    // binary learner with positive coefficient: category 1 above category 0
    const auto g = partial_effects(f.fit, d, "x1");
    REQUIRE(g.points.size() == 2);
    CHECK(f.fit.find("x1")->coef(0) > 0.0);
    CHECK(g.points[1].probability > g.points[0].probability);
    CHECK(g.points[0].label == "reference");
    CHECK(g.points[1].label == "x1=1");
    // odds ratio consistency
    const double odds1 = g.points[1].probability / (1 - g.points[1].probability);
    const double odds0 = g.points[0].probability / (1 - g.points[0].probability);
    CHECK(std::abs(odds1 / odds0 - odds_ratios(f.fit)[0].odds_ratio) < 1e-10);

    // direct evaluation: offset + mean of the other contributions + this one
    const Eigen::VectorXd eta = linear_predictor(f.fit, d);
    const auto* l = f.fit.find("x1");
    const Index j = *d.find(l->column_names[0]);
    const Eigen::VectorXd own = (d.raw_column(j).array() - l->centers[0]) * l->coef(0);
    const double others = (eta - own).mean();
    for (const auto& p : g.points) {
        const double direct = oracle::sigmoid(others + (p.raw[0] - l->centers[0]) * l->coef(0));
        CHECK(std::abs(direct - p.probability) < 1e-12);
    }

    // unselected learner: flat at the average-others probability
    const auto* zero = f.fit.find("x6");
    if (zero && !zero->selected()) {
        const auto flat = partial_effects(f.fit, d, "x6");
        CHECK(flat.points[0].probability == flat.points[1].probability);
    }
    CHECK_THROWS_AS(partial_effects(f.fit, d, "nope"), Error);
}

TEST_CASE("saturated 2x2 probe reproduces cell frequencies") {
    const auto schema = oracle::binary_schema({"m", "p"}, {"m"});
    std::string text = "m,p,y\n";
    const int n[2][2] = {{10, 12}, {9, 15}};
    const int k[2][2] = {{3, 7}, {4, 11}};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int i = 0; i < n[a][b]; ++i)
                text += std::to_string(a) + "," + std::to_string(b) + "," + (i < k[a][b] ? "1" : "0") + "\n";
    const auto r = interaction_probe(csv(text), schema, "m", "p", std::nullopt);
    REQUIRE(r.strata.size() == 1);
    CHECK(r.strata[0].name == "pooled");
    CHECK(r.strata[0].status == "ok");
    for (const auto& c : r.strata[0].cells) {
        const double freq = static_cast<double>(c.positives) / static_cast<double>(c.n);
        CHECK(std::abs(c.probability - freq) < 1e-9);
        CHECK(std::abs(c.probability - oracle::cell_mle(c.positives, c.n)) < 1e-4);
    }
}

TEST_CASE("probe flags separation and empty cells") {
    const auto schema = oracle::binary_schema({"m", "p"}, {"m"});
    const auto sep = interaction_probe(csv("m,p,y\n0,0,0\n0,0,1\n0,1,1\n0,1,0\n1,0,1\n1,0,0\n1,1,0\n1,1,0\n"),
                                       schema, "m", "p", std::nullopt);
    CHECK(sep.strata[0].status == "separation");
    CHECK(std::isnan(sep.strata[0].cells[3].probability));
    const auto empty = interaction_probe(csv("m,p,y\n0,0,0\n0,0,1\n0,1,1\n1,0,0\n1,0,1\n"), schema, "m", "p",
                                         std::nullopt);
    CHECK(empty.strata[0].status == "empty_cell");
}

TEST_CASE("probe with strata: single stratum equals pooled") {
    auto schema = oracle::binary_schema({"m", "p"}, {"m"});
    schema.variables.push_back({"country", VariableKind::binary, {"Chile", "Tunisia"}, "c", false});
    CounterRng rng(3);
    std::string text = "m,p,country,y\n";
    for (int i = 0; i < 200; ++i) {
        text += std::string(rng.bernoulli(0.5) ? "1" : "0") + "," + (rng.bernoulli(0.5) ? "1" : "0") +
                ",Chile," + (rng.bernoulli(0.4) ? "1" : "0") + "\n";
    }
    const auto r = interaction_probe(csv(text), schema, "m", "p", std::string("country"));
    REQUIRE(r.strata.size() == 2);
    CHECK(r.strata[0].name == "Chile");
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(r.strata[0].cells[c].probability == r.strata[1].cells[c].probability);
    }
}

TEST_CASE("probe rejects continuous variables") {
    auto schema = oracle::binary_schema({"m"}, {"m"});
    schema.variables.push_back({"t", VariableKind::continuous, {}, "t", false});
    CHECK_THROWS_AS(interaction_probe(csv("m,t,y\n0,1.5,0\n1,2,1\n"), schema, "m", "t", std::nullopt), Error);
}

TEST_CASE("irls agrees with newton on a random logistic problem") {
    CounterRng rng(4);
    Eigen::MatrixXd x(200, 3);
    Eigen::VectorXd y(200);
    for (Index i = 0; i < 200; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.normal();
        x(i, 2) = rng.bernoulli(0.3);
        y(i) = rng.bernoulli(oracle::sigmoid(0.2 + 0.8 * x(i, 1) - x(i, 2)));
    }
    const auto fit = fit_logistic_irls(x, y);
    CHECK(fit.converged);
    CHECK((fit.beta - oracle::newton_logistic(x, y)).cwiseAbs().maxCoeff() < 1e-8);
}

}
