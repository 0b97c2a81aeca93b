#pragma once

// Independent reference implementations used to check the library:
// d-separation by explicit path enumeration, exact laws of all-binary
// models by full joint enumeration, and a Gaussian-weighted quadrature.

#include "mdimpute/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// d-separation by path enumeration

inline bool is_descendant_or_self(const mdi::MissingDataGraph& g, const std::string& from, const mdi::NodeSet& z) {
    std::vector<std::string> stack{from};
    mdi::NodeSet seen;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (!seen.insert(v).second) continue;
        if (z.contains(v)) return true;
        for (const auto& c : g.children(v)) stack.push_back(c);
    }
    return false;
}

// A path is a node sequence; consecutive nodes are adjacent in the skeleton.
inline bool path_active(const mdi::MissingDataGraph& g, const std::vector<std::string>& path, const mdi::NodeSet& z) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const auto& prev = path[i - 1];
        const auto& v = path[i];
        const auto& next = path[i + 1];
        const bool collider = g.has_edge(prev, v) && g.has_edge(next, v);
        if (collider) {
            if (!is_descendant_or_self(g, v, z)) return false;
        } else if (z.contains(v)) {
            return false;
        }
    }
    return true;
}

inline bool any_active_path(const mdi::MissingDataGraph& g, std::vector<std::string>& path, mdi::NodeSet& on_path,
                            const std::string& target, const mdi::NodeSet& z) {
    const auto& here = path.back();
    if (here == target) return path_active(g, path, z);
    mdi::NodeSet neighbours = g.parents(here);
    neighbours.insert(g.children(here).begin(), g.children(here).end());
    for (const auto& n : neighbours) {
        if (on_path.contains(n)) continue;
        path.push_back(n);
        on_path.insert(n);
        const bool found = any_active_path(g, path, on_path, target, z);
        on_path.erase(n);
        path.pop_back();
        if (found) return true;
    }
    return false;
}

inline bool d_separated_by_paths(const mdi::MissingDataGraph& g, const mdi::NodeSet& a, const mdi::NodeSet& b,
                                 const mdi::NodeSet& z) {
    for (const auto& s : a)
        for (const auto& t : b) {
            std::vector<std::string> path{s};
            mdi::NodeSet on_path{s};
            if (any_active_path(g, path, on_path, t, z)) return false;
        }
    return true;
}

inline std::string node_name(int i) { return "N" + std::to_string(i); }

// Random DAG over fully observed nodes N0..N{k-1}: a random topological
// order and each forward pair joined with probability `density`.
inline mdi::MissingDataGraph random_dag(std::mt19937_64& gen, int k, double density) {
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    std::bernoulli_distribution coin(density);
    std::vector<mdi::Node> nodes;
    for (int i = 0; i < k; ++i) nodes.push_back({node_name(i), mdi::NodeRole::observed()});
    std::vector<mdi::Edge> edges;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (coin(gen)) edges.emplace_back(node_name(order[i]), node_name(order[j]));
    return {nodes, edges};
}

// ---------------------------------------------------------------------------
// Exact laws of all-binary models

class BinaryModel {
public:
    // `params` lists p(node = 1 | parents) for each node in topological order,
    // parent configurations enumerated with the first parent (by name) as the
    // least significant bit.
    BinaryModel(const mdi::MissingDataGraph& g, const std::vector<double>& params) : g_(g) {
        names_ = mdi::topological_order(g);
        for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = i;
        std::size_t next = 0;
        for (const auto& v : names_) {
            const std::size_t configs = std::size_t{1} << g.parents(v).size();
            cpt_[v].assign(params.begin() + static_cast<long>(next), params.begin() + static_cast<long>(next + configs));
            next += configs;
        }
        if (next != params.size()) throw std::invalid_argument("wrong parameter count");
        const std::size_t cells = std::size_t{1} << names_.size();
        joint_.resize(cells);
        for (std::size_t a = 0; a < cells; ++a) {
            double p = 1.0;
            for (const auto& v : names_) {
                std::size_t config = 0, bit = 0;
                for (const auto& pa : g.parents(v)) config |= value(a, pa) << bit++;
                const double p1 = cpt_[v][config];
                p *= value(a, v) ? p1 : 1.0 - p1;
            }
            joint_[a] = p;
        }
    }

    static std::size_t parameter_count(const mdi::MissingDataGraph& g) {
        std::size_t n = 0;
        for (const auto& v : mdi::topological_order(g)) n += std::size_t{1} << g.parents(v).size();
        return n;
    }

    std::size_t value(std::size_t assignment, const std::string& v) const { return (assignment >> index_.at(v)) & 1U; }
    const std::vector<double>& joint() const { return joint_; }
    std::size_t cells() const { return joint_.size(); }

    double prob(const std::function<bool(std::size_t)>& event) const {
        double s = 0.0;
        for (std::size_t a = 0; a < joint_.size(); ++a)
            if (event(a)) s += joint_[a];
        return s;
    }

    // Law of (proxies, fully observed values): each partially observed
    // variable contributes 0, 1 or missing; indicators are implied.
    std::vector<double> observed_law() const {
        std::vector<std::string> coded;
        for (const auto& v : g_.substantive()) coded.push_back(v);
        std::size_t size = 1;
        for (const auto& v : coded) size *= g_.is_partial(v) ? 3 : 2;
        std::vector<double> law(size, 0.0);
        for (std::size_t a = 0; a < joint_.size(); ++a) {
            std::size_t cell = 0, stride = 1;
            for (const auto& v : coded) {
                const bool partial = g_.is_partial(v);
                std::size_t code = value(a, v);
                if (partial && value(a, g_.indicator_of(v)) == 0) code = 2;
                cell += code * stride;
                stride *= partial ? 3 : 2;
            }
            law[cell] += joint_[a];
        }
        return law;
    }

private:
    const mdi::MissingDataGraph& g_;
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::vector<double>> cpt_;
    std::vector<double> joint_;
};

// Two parameter settings with (numerically) equal observed laws and
// different full laws.
struct Collision {
    std::vector<double> first, second;
    double observed_gap = 0.0;
    double full_gap = 0.0;
};

// Enumerates every CPT setting with entries from `grid` and looks for two
// settings whose observed laws agree to 1e-9 while their full laws differ.
inline std::optional<Collision> find_observational_collision(const mdi::MissingDataGraph& g,
                                                             const std::vector<double>& grid) {
    const std::size_t k = BinaryModel::parameter_count(g);
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= grid.size();
    std::map<std::vector<long long>, std::vector<double>> seen;
    std::vector<double> params(k);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t i = 0; i < k; ++i) {
            params[i] = grid[c % grid.size()];
            c /= grid.size();
        }
        const BinaryModel model(g, params);
        const auto law = model.observed_law();
        std::vector<long long> key;
        for (double p : law) key.push_back(std::llround(p * 1e9));
        auto [it, inserted] = seen.try_emplace(key, params);
        if (inserted) continue;
        const BinaryModel other(g, it->second);
        double full_gap = 0.0, observed_gap = 0.0;
        for (std::size_t a = 0; a < model.cells(); ++a)
            full_gap = std::max(full_gap, std::abs(model.joint()[a] - other.joint()[a]));
        const auto other_law = other.observed_law();
        for (std::size_t i = 0; i < law.size(); ++i)
            observed_gap = std::max(observed_gap, std::abs(law[i] - other_law[i]));
        if (full_gap > 1e-6 && observed_gap <= 1e-9) return Collision{it->second, params, observed_gap, full_gap};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Quadrature

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// ∫ f(x) φ(x) dx over [-12, 12] by composite Simpson.
inline double gaussian_expectation(const std::function<double(double)>& f, int panels = 4000) {
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / panels;
    double s = f(lo) * normal_pdf(lo) + f(hi) * normal_pdf(hi);
    for (int i = 1; i < panels; ++i) {
        const double x = lo + i * h;
        s += (i % 2 ? 4.0 : 2.0) * f(x) * normal_pdf(x);
    }
    return s * h / 3.0;
}

}  // namespace oracle
