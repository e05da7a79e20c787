#include <doctest.h>

#include "oracles.hpp"
#include "sgboost/base_learner.hpp"
#include "sgboost/error.hpp"

using namespace sgboost;

namespace {

DesignMatrix single_column(double xtx) {
    DesignMatrix d;
    d.values.resize(4, 1);
    const double a = std::sqrt(xtx / 4.0);
    d.values << a, -a, a, -a;
    d.columns.push_back({"x", "x", {}, {}, 0.0, false});
    return d;
}

std::vector<Index> all_columns(const DesignMatrix& d) {
    std::vector<Index> c(static_cast<std::size_t>(d.cols()));
    for (Index j = 0; j < d.cols(); ++j) c[static_cast<std::size_t>(j)] = j;
    return c;
}

}  // namespace

TEST_SUITE("base-learners") {

TEST_CASE("full-rank submatrix at lambda 0 has df equal to its column count") {
    CounterRng rng(1);
    const auto d = oracle::random_design(rng, 30, 4);
    CHECK(effective_df(d, all_columns(d), 0.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("huge lambda drives df to zero") {
    CounterRng rng(2);
    const auto d = oracle::random_design(rng, 30, 3);
    const auto spec = gram_spectrum(d, all_columns(d));
    CHECK(effective_df(spec, 1e12 * spec.max_eigenvalue()) < 1e-9);
}

TEST_CASE("single column with x'x = 100 and lambda 241.4214 has df one half") {
    const auto d = single_column(100.0);
    const std::vector<Index> cols{0};
    CHECK(std::abs(effective_df(d, cols, 241.4214) - 0.5) < 1e-6);
    CHECK(std::abs(oracle::trace_df(d.values, 241.4214) - 0.5) < 1e-6);
}

TEST_CASE("calibration of a single column matches the closed form") {
    const auto d = single_column(100.0);
    const std::vector<Index> cols{0};
    const double t = 1.0 - std::sqrt(0.5);
    const double expected = 100.0 * (1.0 / t - 1.0);
    const double lambda = calibrate_lambda(d, cols, 0.5);
    CHECK(lambda == doctest::Approx(expected).epsilon(1e-7));
    CHECK(std::abs(oracle::trace_df(d.values, lambda) - 0.5) < 1e-8);
    CHECK(calibrate_lambda(d, cols, 1.0) == 0.0);
}

TEST_CASE("orthogonal group with equal eigenvalues, df 2 over 4 columns") {
    DesignMatrix d;
    d.values = Eigen::MatrixXd::Zero(8, 4);
    for (Index j = 0; j < 4; ++j) {
        d.values(2 * j, j) = 1.5;
        d.values(2 * j + 1, j) = -1.5;
        d.columns.push_back({"c" + std::to_string(j), "g", {}, {}, 0.0, false});
    }
    const auto cols = all_columns(d);
    const double lambda = calibrate_lambda(d, cols, 2.0);
    const double dd = 4.5;
    const double t = dd / (dd + lambda);
    CHECK(2 * t - t * t == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(oracle::trace_df(d.values, lambda) - 2.0) < 1e-8);
}

TEST_CASE("unattainable df targets are rejected") {
    CounterRng rng(3);
    const auto d = oracle::random_design(rng, 20, 2);
    const auto cols = all_columns(d);
    CHECK_THROWS_AS(calibrate_lambda(d, cols, 2.5), Error);
    CHECK_THROWS_AS(calibrate_lambda(d, cols, 0.0), Error);
}

TEST_CASE("rank-deficient block: df(0) equals the rank") {
    CounterRng rng(4);
    auto d = oracle::random_design(rng, 20, 3);
    d.values.col(2) = d.values.col(0) + d.values.col(1);
    const auto cols = all_columns(d);
    CHECK(effective_df(d, cols, 0.0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(oracle::trace_df(d.values, 0.0) - 2.0) < 1e-8);
}

TEST_CASE("df decreases strictly in lambda and agrees with the dense trace") {
    CounterRng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const auto d = oracle::random_design(rng, 25, 1 + rep % 5);
        const auto cols = all_columns(d);
        double prev = effective_df(d, cols, 0.0);
        for (int k = -4; k <= 4; ++k) {
            const double lambda = std::pow(10.0, k);
            const double df = effective_df(d, cols, lambda);
            CHECK(df < prev);
            CHECK(std::abs(df - oracle::trace_df(d.values, lambda)) < 1e-9);
            prev = df;
        }
    }
}

TEST_CASE("target orthogonal to the learner gives zero beta") {
    DesignMatrix d;
    d.values.resize(4, 1);
    d.values << 1, -1, 1, -1;
    d.columns.push_back({"x", "x", {}, {}, 0.0, false});
    BaseLearner l{"x", {0}, 0.0, 1.0, LearnerKind::individual};
    Eigen::VectorXd u(4);
    u << 1, 1, -1, -1;
    const auto fit = fit_learner(d, l, u);
    CHECK(fit.beta(0) == doctest::Approx(0.0));
    CHECK(fit.sse == doctest::Approx(u.squaredNorm()));
}

TEST_CASE("single column at lambda 0 is simple least squares") {
    CounterRng rng(6);
    const auto d = oracle::random_design(rng, 15, 1);
    Eigen::VectorXd u(15);
    for (Index i = 0; i < 15; ++i) u(i) = rng.normal();
    BaseLearner l{"c0", {0}, 0.0, 1.0, LearnerKind::individual};
    const auto fit = fit_learner(d, l, u);
    const Eigen::VectorXd x = d.values.col(0);
    CHECK(fit.beta(0) == doctest::Approx(x.dot(u) / x.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("ridge fit matches a dense normal-equations solve") {
    CounterRng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = oracle::random_design(rng, 5, 2);
        Eigen::VectorXd u(5);
        for (Index i = 0; i < 5; ++i) u(i) = rng.normal();
        BaseLearner l{"b", {0, 1}, 3.7, 1.0, LearnerKind::group};
        const auto fit = fit_learner(d, l, u);
        const auto beta = oracle::ridge_beta(d.values, 3.7, u);
        CHECK((fit.beta - beta).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(fit.sse - oracle::ridge_sse(d.values, 3.7, u)) < 1e-10);
    }
}

TEST_CASE("shrinkage: larger lambda never grows the coefficient norm") {
    CounterRng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = oracle::random_design(rng, 20, 3);
        Eigen::VectorXd u(20);
        for (Index i = 0; i < 20; ++i) u(i) = rng.normal();
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
            BaseLearner l{"b", {0, 1, 2}, lambda, 1.0, LearnerKind::group};
            const double norm = fit_learner(d, l, u).beta.norm();
            CHECK(norm <= prev + 1e-12);
            prev = norm;
        }
    }
}

TEST_CASE("calibration round trip on random designs") {
    CounterRng rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        const Index p = 1 + static_cast<Index>(rng.below(6));
        const auto d = oracle::random_design(rng, 10 + static_cast<Index>(rng.below(50)), p);
        const auto cols = all_columns(d);
        const double target = std::max(1e-3, rng.uniform() * static_cast<double>(p));
        const double lambda = calibrate_lambda(d, cols, target);
        CHECK(std::abs(effective_df(d, cols, lambda) - target) <= 1e-8);
    }
}

}
