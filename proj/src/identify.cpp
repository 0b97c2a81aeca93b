#include "mdimpute/identify.hpp"

#include "mdimpute/error.hpp"
#include "mdimpute/log.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mdi {

namespace {

std::string join(const NodeSet& s, const char* sep = ", ") {
    std::string out;
    for (const auto& n : s) {
        if (!out.empty()) out += sep;
        out += n;
    }
    return out;
}

IndependenceCheck make_check(const MissingDataGraph& g, const NodeId& variable,
                             std::span<const NodeId> predecessors) {
    IndependenceCheck check;
    check.variable = variable;
    if (g.is_partial(variable)) check.indicators.insert(g.indicator_of(variable));
    for (const auto& p : predecessors) {
        check.given.insert(p);
        if (g.is_partial(p)) check.indicators.insert(g.indicator_of(p));
    }
    check.holds = d_separated(g, {variable}, check.indicators, check.given);
    return check;
}

}  // namespace

std::string describe(const Witness& w) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SelfCensoring>)
                return "self-censoring " + v.variable + " → " + v.indicator;
            else
                return "colluder " + v.variable + " → " + v.collider + " ← " + v.own_indicator;
        },
        w);
}

FullLawDecision full_law_identifiable(const MissingDataGraph& g) {
    FullLawDecision decision;
    for (const auto& r : g.indicators()) {
        const auto& owner = g.role(r).owner;
        const auto& parents = g.parents(r);
        if (parents.contains(owner)) decision.witnesses.emplace_back(SelfCensoring{owner, r});
        for (const auto& p : parents) {
            if (p == owner || !g.is_partial(p)) continue;
            const auto& rp = g.indicator_of(p);
            if (parents.contains(rp)) decision.witnesses.emplace_back(Colluder{p, rp, r});
        }
    }
    decision.identifiable = decision.witnesses.empty();
    return decision;
}

std::string describe(const IndependenceCheck& c) {
    std::string out = c.variable + " ⊥ {" + join(c.indicators) + "}";
    if (!c.given.empty()) out += " | " + join(c.given);
    return out;
}

bool OrderingCertificate::valid() const { return first_failure() == nullptr; }

const IndependenceCheck* OrderingCertificate::first_failure() const {
    const auto it = std::find_if(checks.begin(), checks.end(), [](const auto& c) { return !c.holds; });
    return it == checks.end() ? nullptr : &*it;
}

OrderingCertificate verify_ordering(const MissingDataGraph& g, const Ordering& ordering) {
    auto expected = g.substantive();
    auto given = ordering;
    std::sort(expected.begin(), expected.end());
    std::sort(given.begin(), given.end());
    if (expected != given)
        throw OrderingError("ordering is not a permutation of the substantive variables");

    OrderingCertificate cert{ordering, {}};
    for (std::size_t k = 0; k < ordering.size(); ++k)
        cert.checks.push_back(make_check(g, ordering[k], std::span(ordering).first(k)));
    return cert;
}

std::optional<OrderingCertificate> find_decomposable_ordering(const MissingDataGraph& g,
                                                              const OrderingSearchOptions& options) {
    auto names = g.substantive();
    std::sort(names.begin(), names.end());
    const auto k = names.size();
    if (k > options.hard_cap)
        throw SizeLimitError("ordering search over " + std::to_string(k) + " variables refused (cap " +
                             std::to_string(options.hard_cap) + ")");
    if (k > options.warn_above)
        warn("ordering search over " + std::to_string(k) + " variables enumerates up to " +
             std::to_string(k) + "! permutations");

    // A position's condition depends only on (variable, set of predecessors),
    // so depth-first search over prefixes in name order visits orderings
    // lexicographically and can cut a failing prefix without changing the
    // first valid ordering found.
    std::map<std::pair<NodeId, NodeSet>, bool> memo;
    Ordering prefix;
    std::vector<bool> used(k, false);

    auto holds = [&](const NodeId& v) {
        NodeSet preds(prefix.begin(), prefix.end());
        auto key = std::make_pair(v, std::move(preds));
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const bool ok = make_check(g, v, prefix).holds;
        memo.emplace(std::move(key), ok);
        return ok;
    };

    auto search = [&](auto&& self) -> bool {
        if (prefix.size() == k) return true;
        for (std::size_t i = 0; i < k; ++i) {
            if (used[i] || !holds(names[i])) continue;
            prefix.push_back(names[i]);
            if (!options.prune_prefix || options.prune_prefix(prefix)) {
                used[i] = true;
                if (self(self)) return true;
                used[i] = false;
            }
            prefix.pop_back();
        }
        return false;
    };

    if (!search(search)) return std::nullopt;
    return verify_ordering(g, prefix);
}

std::string describe(const FactorizationTerm& t) {
    std::string out = "p(" + t.target;
    std::string cond;
    for (const auto& c : t.conditioning) cond += (cond.empty() ? "" : ", ") + c;
    for (const auto& r : t.required_indicators) cond += (cond.empty() ? "" : ", ") + r + "=1";
    if (!cond.empty()) out += " | " + cond;
    return out + ")";
}

std::vector<FactorizationTerm> target_law_factorization(const MissingDataGraph& g,
                                                        const OrderingCertificate& cert, bool prune) {
    const auto fresh = verify_ordering(g, cert.ordering);
    if (fresh.checks != cert.checks) throw OrderingError("certificate does not match the graph");
    if (const auto* f = fresh.first_failure())
        throw OrderingError("invalid certificate: " + describe(*f) + " does not hold");

    std::vector<FactorizationTerm> terms;
    for (std::size_t k = 0; k < cert.ordering.size(); ++k) {
        FactorizationTerm term;
        term.target = cert.ordering[k];
        term.conditioning.assign(cert.ordering.begin(), cert.ordering.begin() + static_cast<long>(k));
        term.required_indicators = cert.checks[k].indicators;

        if (prune) {
            NodeSet dropped;
            std::vector<NodeId> kept = term.conditioning;
            for (const auto& c : term.conditioning) {
                NodeSet rest;
                for (const auto& x : kept)
                    if (x != c) rest.insert(x);
                NodeSet candidate = dropped;
                candidate.insert(c);
                if (d_separated(g, {term.target}, candidate, rest)) {
                    dropped = std::move(candidate);
                    std::erase(kept, c);
                }
            }
            term.conditioning = std::move(kept);
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

}  // namespace mdi
