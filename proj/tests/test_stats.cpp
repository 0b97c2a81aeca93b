#include "mdimpute/error.hpp"
#include "mdimpute/stats.hpp"

#include <doctest.h>

#include <random>

using namespace mdi;

TEST_CASE("statistic labels and ordering") {
    const auto stats = standard_statistics({"X", "W", "Z"});
    std::vector<std::string> labels;
    for (const auto& s : stats) labels.push_back(s.label());
    CHECK(labels == std::vector<std::string>{"E(X)", "E(W)", "E(Z)", "sd(X)", "sd(W)", "sd(Z)", "Cor(X,W)",
                                             "Cor(X,Z)", "Cor(W,Z)"});
    CHECK(standard_statistics({"X", "W", "Z", "Y"}).size() == 14);
    CHECK_THROWS_AS(StatisticId::corr("X", "X"), SpecError);
}

TEST_CASE("basic estimators") {
    Eigen::VectorXd x(4), y(4);
    x << 1, 2, 3, 4;
    y << 2, 4, 6, 8;
    CHECK(sample_mean(x) == doctest::Approx(2.5));
    CHECK(sample_sd(x) == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    CHECK(pearson(x, (-y).eval()) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(sample_sd(Eigen::VectorXd::Ones(1)), DataError);
}

TEST_CASE("estimator properties under affine maps") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd x(30), y(30);
        for (int i = 0; i < 30; ++i) {
            x(i) = z(gen);
            y(i) = 0.3 * x(i) + z(gen);
        }
        const double a = 1.0 + std::abs(z(gen)), b = z(gen);
        const Eigen::VectorXd ax = (a * x.array() + b).matrix();
        CHECK(sample_mean(ax) == doctest::Approx(a * sample_mean(x) + b));
        CHECK(sample_sd(ax) == doctest::Approx(a * sample_sd(x)));
        const double r = pearson(x, y);
        CHECK(r == doctest::Approx(pearson(y, x)));
        CHECK(pearson(ax, y) == doctest::Approx(r));
        CHECK(std::abs(r) <= 1.0 + 1e-12);
    }
}

TEST_CASE("summaries from moments") {
    Eigen::VectorXd mean(2);
    mean << 1.0, -1.0;
    Eigen::MatrixXd cov(2, 2);
    cov << 4.0, 1.0, 1.0, 1.0;
    const auto est = summarize({"A", "B"}, mean, cov, standard_statistics({"A", "B"}));
    CHECK(est.at(StatisticId::mean("A")) == 1.0);
    CHECK(est.at(StatisticId::sd("A")) == doctest::Approx(2.0));
    CHECK(est.at(StatisticId::corr("A", "B")) == doctest::Approx(0.5));
}

TEST_CASE("pooling is the mean of per-imputation estimates") {
    const std::vector<double> v{1.0, 2.0, 6.0};
    CHECK(pool(std::span<const double>(v)) == doctest::Approx(3.0));
    CHECK_THROWS(pool(std::span<const double>()));

    const auto s = StatisticId::mean("X");
    const std::vector<Estimates> per{{{s, 1.0}}, {{s, 3.0}}};
    CHECK(pool(std::span<const Estimates>(per)).at(s) == doctest::Approx(2.0));
}

TEST_CASE("bias table") {
    const auto stats = standard_statistics({"X"});
    const Estimates truth{{stats[0], 0.0}, {stats[1], 1.0}};
    const std::vector<MethodEstimates> methods{{"CCA", {{stats[0], 0.41}, {stats[1], 0.9}}},
                                               {"MI", {{stats[0], 0.03}, {stats[1], 1.0}}}};
    const auto t = bias_table(stats, truth, methods);
    CHECK(t.bias(0, 0) == doctest::Approx(0.41));
    CHECK(t.bias(1, 0) == doctest::Approx(-0.1));
    CHECK(t.to_csv() == "statistic,method,truth,estimate,bias\n"
                        "\"E(X)\",CCA,0,0.41,0.41\n"
                        "\"E(X)\",MI,0,0.03,0.03\n"
                        "\"sd(X)\",CCA,1,0.9,-0.09999999999999998\n"
                        "\"sd(X)\",MI,1,1,0\n");
    const auto md = t.to_markdown();
    CHECK(md == "| Statistic | Truth |   CCA |   MI |\n"
                "|:----------|------:|------:|-----:|\n"
                "| E(X)      |  0.00 |  0.41 | 0.03 |\n"
                "| sd(X)     |  1.00 | -0.10 | 0.00 |\n");

    CHECK_THROWS_AS(bias_table(stats, truth, {{"Bad", {{stats[0], 1.0}}}}), SpecError);
}
