#pragma once

#include "mdimpute/graph.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mdi {

/// Edge X -> R_X.
struct SelfCensoring {
    NodeId variable;
    NodeId indicator;
    friend bool operator==(const SelfCensoring&, const SelfCensoring&) = default;
};

/// Edges X -> R_W <- R_X, where R_W is the indicator of some other variable.
struct Colluder {
    NodeId variable;        // X
    NodeId own_indicator;   // R_X
    NodeId collider;        // R_W
    friend bool operator==(const Colluder&, const Colluder&) = default;
};

using Witness = std::variant<SelfCensoring, Colluder>;

std::string describe(const Witness& w);

struct FullLawDecision {
    bool identifiable = true;
    std::vector<Witness> witnesses;  // empty iff identifiable
};

/// Full-law identifiability for a missing-data DAG without latent variables:
/// identifiable iff there is no self-censoring edge and no colluder.
FullLawDecision full_law_identifiable(const MissingDataGraph& g);

using Ordering = std::vector<NodeId>;

/// One ordered-imputation condition: variable ⊥ indicators | given.
struct IndependenceCheck {
    NodeId variable;
    NodeSet indicators;
    NodeSet given;
    bool holds = false;
    friend bool operator==(const IndependenceCheck&, const IndependenceCheck&) = default;
};

std::string describe(const IndependenceCheck& c);

struct OrderingCertificate {
    Ordering ordering;
    std::vector<IndependenceCheck> checks;  // one per position, in ordering sequence

    bool valid() const;
    /// First failing check, if any.
    const IndependenceCheck* first_failure() const;
};

/// Checks, for every position k, that X(k) is d-separated from its own
/// response indicator and those of all its predecessors given the
/// predecessors. Fully observed variables contribute no indicator.
/// Throws OrderingError when `ordering` is not a permutation of the
/// substantive variables of `g`.
OrderingCertificate verify_ordering(const MissingDataGraph& g, const Ordering& ordering);

struct OrderingSearchOptions {
    std::size_t warn_above = 9;  // warn when K exceeds this
    std::size_t hard_cap = 12;   // refuse when K exceeds this
    /// Optional search-space reducer: return false to discard every ordering
    /// starting with the given prefix. Must not discard valid orderings.
    std::function<bool(std::span<const NodeId> prefix)> prune_prefix;
};

/// Lexicographically first ordering (by node name) whose certificate is
/// valid, or nullopt. Throws SizeLimitError above `hard_cap` variables.
std::optional<OrderingCertificate> find_decomposable_ordering(const MissingDataGraph& g,
                                                              const OrderingSearchOptions& options = {});

/// p(target | conditioning, required_indicators = 1).
struct FactorizationTerm {
    NodeId target;
    std::vector<NodeId> conditioning;  // predecessors in ordering sequence
    NodeSet required_indicators;
    friend bool operator==(const FactorizationTerm&, const FactorizationTerm&) = default;
};

std::string describe(const FactorizationTerm& t);

/// Chain factorization of the target law induced by a valid certificate.
/// With `prune`, conditioning variables that are d-separated from the
/// target given the remaining ones are dropped (indicator requirements are
/// kept). Throws OrderingError for an invalid or mismatched certificate.
std::vector<FactorizationTerm> target_law_factorization(const MissingDataGraph& g,
                                                        const OrderingCertificate& cert,
                                                        bool prune = false);

}  // namespace mdi
