#include "mdimpute/simulate.hpp"

#include "mdimpute/error.hpp"
#include "mdimpute/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mdi {

void SemSpec::set(const NodeId& variable, StructuralEquation eq) {
    if (!std::isfinite(eq.sd) || eq.sd <= 0.0)
        throw SpecError("error sd of '" + variable + "' must be strictly positive");
    if (!std::isfinite(eq.intercept)) throw SpecError("intercept of '" + variable + "' is not finite");
    for (const auto& [p, c] : eq.coefficients)
        if (!std::isfinite(c)) throw SpecError("coefficient " + p + " -> " + variable + " is not finite");
    equations_[variable] = std::move(eq);
}

const StructuralEquation& SemSpec::equation(const NodeId& variable) const {
    const auto it = equations_.find(variable);
    if (it == equations_.end()) throw SpecError("no structural equation for '" + variable + "'");
    return it->second;
}

void SemSpec::validate(const MissingDataGraph& g) const {
    for (const auto& v : g.substantive()) {
        const auto& eq = equation(v);
        for (const auto& [p, c] : eq.coefficients) {
            if (!g.contains(p) || !g.is_substantive(p) || !g.has_edge(p, v))
                throw SpecError("coefficient on '" + p + "' for '" + v + "' does not follow a graph edge");
        }
    }
    for (const auto& [v, eq] : equations_)
        if (!g.contains(v) || !g.is_substantive(v))
            throw SpecError("structural equation for '" + v + "' which is not a substantive node");
}

void ResponseSpec::set(const NodeId& indicator, ResponseModel model) {
    if (const auto* c = std::get_if<ConstantProb>(&model))
        if (!(c->p > 0.0 && c->p < 1.0))
            throw SpecError("response probability of '" + indicator + "' must lie in (0,1)");
    models_[indicator] = std::move(model);
}

const ResponseModel& ResponseSpec::model(const NodeId& indicator) const {
    const auto it = models_.find(indicator);
    if (it == models_.end()) throw SpecError("no response model for '" + indicator + "'");
    return it->second;
}

void ResponseSpec::validate(const MissingDataGraph& g) const {
    for (const auto& r : g.indicators()) {
        const auto& m = model(r);
        if (const auto* l = std::get_if<Logistic>(&m))
            for (const auto& t : l->terms)
                for (const auto& f : t.factors)
                    if (!g.contains(f) || !g.has_edge(f, r))
                        throw SpecError("response model of '" + r + "' uses '" + f +
                                        "' which is not a graph parent");
    }
    for (const auto& [r, m] : models_)
        if (!g.contains(r) || !g.is_indicator(r))
            throw SpecError("response model for '" + r + "' which is not an indicator node");
}

Frame simulate_complete(const SemSpec& sem, const MissingDataGraph& g, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw SpecError("sample size must be at least 1");
    sem.validate(g);

    Frame out(g.substantive(), static_cast<Eigen::Index>(n));
    Rng rng(Rng::derive(seed, "complete"));
    for (const auto& v : topological_order(g)) {
        if (!g.is_substantive(v)) continue;
        const auto& eq = sem.equation(v);
        Eigen::VectorXd col = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), eq.intercept);
        for (const auto& [p, c] : eq.coefficients) col += c * out.col(p);
        for (Eigen::Index i = 0; i < col.size(); ++i) col[i] += eq.sd * rng.normal();
        out.col(v) = col;
    }
    return out;
}

IndicatorColumns simulate_responses(const ResponseSpec& resp, const MissingDataGraph& g, const Frame& values,
                                    std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(values.rows());
    IndicatorColumns out;
    Rng rng(Rng::derive(seed, "responses"));

    for (const auto& r : topological_order(g)) {
        if (!g.is_indicator(r)) continue;
        const auto& model = resp.model(r);
        IndicatorColumn col(n);

        if (const auto* c = std::get_if<ConstantProb>(&model)) {
            for (auto& x : col) x = rng.bernoulli(c->p) ? 1 : 0;
        } else {
            const auto& terms = std::get<Logistic>(model).terms;
            Eigen::VectorXd eta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            for (const auto& t : terms) {
                Eigen::VectorXd prod = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), t.coefficient);
                for (const auto& f : t.factors) {
                    if (!g.contains(f) || !g.has_edge(f, r))
                        throw SpecError("response model of '" + r + "' uses '" + f + "' which is not a graph parent");
                    if (g.is_indicator(f)) {
                        const auto it = out.find(f);
                        if (it == out.end())
                            throw SpecError("response model of '" + r + "' references indicator '" + f +
                                            "' before it is generated");
                        for (std::size_t i = 0; i < n; ++i) prod[static_cast<Eigen::Index>(i)] *= it->second[i];
                    } else {
                        prod = prod.cwiseProduct(values.col(f));
                    }
                }
                eta += prod;
            }
            for (std::size_t i = 0; i < n; ++i) col[i] = rng.bernoulli(sigmoid(eta[static_cast<Eigen::Index>(i)])) ? 1 : 0;
        }
        out.emplace(r, std::move(col));
    }
    return out;
}

Dataset apply_mask(const MissingDataGraph& g, const Frame& values, const IndicatorColumns& indicators) {
    const auto n = static_cast<std::size_t>(values.rows());
    Dataset d(n);
    for (const auto& v : g.substantive()) {
        if (!values.has(v)) throw DataError("no values for '" + v + "'");
        const auto col = values.col(v);
        if (!g.is_partial(v)) {
            d.add_observed(v, std::vector<double>(col.begin(), col.end()));
            continue;
        }
        const auto& r = g.indicator_of(v);
        const auto it = indicators.find(r);
        if (it == indicators.end()) throw DataError("no indicator column '" + r + "'");
        if (it->second.size() != n) throw DataError("indicator '" + r + "' length mismatch");
        std::vector<Cell> proxy(n);
        for (std::size_t i = 0; i < n; ++i)
            if (it->second[i]) proxy[i] = col[static_cast<Eigen::Index>(i)];
        d.add_partial(v, r, std::move(proxy), it->second);
    }
    return d;
}

Moments implied_moments(const SemSpec& sem, const MissingDataGraph& g) {
    sem.validate(g);
    Moments m;
    m.names = g.substantive();
    const auto k = static_cast<Eigen::Index>(m.names.size());
    std::map<NodeId, Eigen::Index> pos;
    for (Eigen::Index i = 0; i < k; ++i) pos[m.names[static_cast<std::size_t>(i)]] = i;

    // x = c + B x + e  =>  x = (I - B)^-1 (c + e)
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd c(k), noise_var(k);
    for (const auto& [v, i] : pos) {
        const auto& eq = sem.equation(v);
        c[i] = eq.intercept;
        noise_var[i] = eq.sd * eq.sd;
        for (const auto& [p, coef] : eq.coefficients) b(i, pos.at(p)) = coef;
    }
    const Eigen::MatrixXd total = (Eigen::MatrixXd::Identity(k, k) - b).inverse();
    m.mean = total * c;
    m.covariance = total * noise_var.asDiagonal() * total.transpose();
    return m;
}

}  // namespace mdi
