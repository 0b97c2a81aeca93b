#pragma once

#include "mdimpute/dataset.hpp"
#include "mdimpute/graph.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

namespace mdi {

/// value = intercept + Σ coefficient·parent + N(0, sd²)
struct StructuralEquation {
    double intercept = 0.0;
    std::map<NodeId, double> coefficients;
    double sd = 1.0;
    friend bool operator==(const StructuralEquation&, const StructuralEquation&) = default;
};

/// Linear-Gaussian structural model over the substantive variables.
class SemSpec {
public:
    /// Throws SpecError unless sd is finite and strictly positive.
    void set(const NodeId& variable, StructuralEquation eq);
    const std::map<NodeId, StructuralEquation>& equations() const { return equations_; }
    const StructuralEquation& equation(const NodeId& variable) const;

    /// Every substantive node has an equation, nothing else does, and every
    /// coefficient refers to a substantive parent in `g`.
    void validate(const MissingDataGraph& g) const;

    friend bool operator==(const SemSpec&, const SemSpec&) = default;

private:
    std::map<NodeId, StructuralEquation> equations_;
};

/// coefficient · Π factors; an empty factor list is a constant.
struct ResponseTerm {
    double coefficient = 0.0;
    std::vector<NodeId> factors;
    friend bool operator==(const ResponseTerm&, const ResponseTerm&) = default;
};

struct ConstantProb {
    double p = 0.5;
    friend bool operator==(const ConstantProb&, const ConstantProb&) = default;
};

/// P(R = 1) = sigmoid(Σ terms)
struct Logistic {
    std::vector<ResponseTerm> terms;
    friend bool operator==(const Logistic&, const Logistic&) = default;
};

using ResponseModel = std::variant<ConstantProb, Logistic>;

/// Response mechanisms keyed by indicator name.
class ResponseSpec {
public:
    void set(const NodeId& indicator, ResponseModel model);
    const std::map<NodeId, ResponseModel>& models() const { return models_; }
    const ResponseModel& model(const NodeId& indicator) const;

    /// Every indicator has a model; constant probabilities lie in (0,1);
    /// logistic factors are graph parents of the indicator.
    void validate(const MissingDataGraph& g) const;

    friend bool operator==(const ResponseSpec&, const ResponseSpec&) = default;

private:
    std::map<NodeId, ResponseModel> models_;
};

inline double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

/// Complete values of every substantive variable (columns in graph
/// declaration order), generated in topological order.
Frame simulate_complete(const SemSpec& sem, const MissingDataGraph& g, std::size_t n, std::uint64_t seed);

/// Response indicators, generated in topological order over the indicators.
IndicatorColumns simulate_responses(const ResponseSpec& resp, const MissingDataGraph& g, const Frame& values,
                                    std::uint64_t seed);

/// Proxies from true values and indicators: the value where the indicator is
/// 1, NA where it is 0. Variables without an indicator are fully observed.
Dataset apply_mask(const MissingDataGraph& g, const Frame& values, const IndicatorColumns& indicators);

/// Mean vector and covariance matrix implied by a linear-Gaussian model,
/// indexed like `g.substantive()`.
struct Moments {
    std::vector<NodeId> names;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};
Moments implied_moments(const SemSpec& sem, const MissingDataGraph& g);

}  // namespace mdi
