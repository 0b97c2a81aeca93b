#pragma once

#include "mdimpute/dataset.hpp"
#include "mdimpute/error.hpp"
#include "mdimpute/graph.hpp"

#include <Eigen/Core>

#include <cmath>
#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mdi {

template <typename Derived>
typename Derived::Scalar sample_mean(const Eigen::MatrixBase<Derived>& x) {
    if (x.size() == 0) throw DataError("mean of an empty sample");
    return x.mean();
}

/// Sample standard deviation with divisor n - 1.
template <typename Derived>
typename Derived::Scalar sample_sd(const Eigen::MatrixBase<Derived>& x) {
    using std::sqrt;
    if (x.size() < 2) throw DataError("sd needs at least two observations");
    const auto centered = (x.array() - x.mean()).matrix();
    return sqrt(centered.squaredNorm() / static_cast<typename Derived::Scalar>(x.size() - 1));
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
    using std::sqrt;
    if (x.size() != y.size()) throw DataError("correlation of samples with different lengths");
    if (x.size() < 2) throw DataError("correlation needs at least two observations");
    const auto cx = (x.array() - x.mean()).matrix().eval();
    const auto cy = (y.array() - y.mean()).matrix().eval();
    return cx.dot(cy) / sqrt(cx.squaredNorm() * cy.squaredNorm());
}

enum class StatKind { Mean, Sd, Corr };

/// E(X), sd(X) or Cor(X,Y).
class StatisticId {
public:
    static StatisticId mean(NodeId x) { return {StatKind::Mean, std::move(x), {}}; }
    static StatisticId sd(NodeId x) { return {StatKind::Sd, std::move(x), {}}; }
    /// Throws SpecError when x == y.
    static StatisticId corr(NodeId x, NodeId y);

    StatKind kind() const { return kind_; }
    const NodeId& first() const { return first_; }
    const NodeId& second() const { return second_; }
    /// Variables the statistic needs (one or two).
    std::vector<NodeId> variables() const;
    std::string label() const;

    friend auto operator<=>(const StatisticId&, const StatisticId&) = default;
    friend bool operator==(const StatisticId&, const StatisticId&) = default;

private:
    StatisticId(StatKind k, NodeId a, NodeId b) : kind_(k), first_(std::move(a)), second_(std::move(b)) {}
    StatKind kind_;
    NodeId first_;
    NodeId second_;
};

/// Means, then sds, then correlations of all pairs in the given order.
std::vector<StatisticId> standard_statistics(const std::vector<NodeId>& variables);

using Estimates = std::map<StatisticId, double>;

Estimates summarize(const Frame& sample, const std::vector<StatisticId>& stats);
/// Statistics implied by a mean vector and covariance matrix.
Estimates summarize(const std::vector<NodeId>& names, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                    const std::vector<StatisticId>& stats);

double pool(std::span<const double> per_imputation);
/// Averages each statistic across imputations; all inputs must share keys.
Estimates pool(std::span<const Estimates> per_imputation);

/// Statistic × method grid of truth, estimate and bias.
struct EstimateTable {
    std::vector<StatisticId> statistics;
    std::vector<std::string> methods;  // display labels
    std::vector<double> truth;         // per statistic
    Eigen::MatrixXd estimates;         // statistics × methods

    double bias(std::size_t stat, std::size_t method) const {
        return estimates(static_cast<Eigen::Index>(stat), static_cast<Eigen::Index>(method)) - truth[stat];
    }
    /// Long form: statistic,method,truth,estimate,bias at full precision.
    std::string to_csv() const;
    /// Paper-style layout: Statistic | Truth | one bias column per method, 2 decimals.
    std::string to_markdown() const;
};

struct MethodEstimates {
    std::string method;
    Estimates estimates;
};

/// Throws SpecError when a method has no estimates or its statistics differ
/// from `truth`. Rows follow `order`; columns follow `methods`.
EstimateTable bias_table(const std::vector<StatisticId>& order, const Estimates& truth,
                         const std::vector<MethodEstimates>& methods);

}  // namespace mdi
