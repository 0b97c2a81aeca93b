#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdi {

using NodeId = std::string;
using NodeSet = std::set<NodeId>;

enum class RoleKind { FullyObserved, PartiallyObserved, ResponseIndicator };

struct NodeRole {
    RoleKind kind = RoleKind::FullyObserved;
    NodeId owner;  // set only for ResponseIndicator

    static NodeRole observed() { return {RoleKind::FullyObserved, {}}; }
    static NodeRole partial() { return {RoleKind::PartiallyObserved, {}}; }
    static NodeRole indicator(NodeId of) { return {RoleKind::ResponseIndicator, std::move(of)}; }

    friend bool operator==(const NodeRole&, const NodeRole&) = default;
};

struct Node {
    NodeId name;
    NodeRole role;
    friend bool operator==(const Node&, const Node&) = default;
};

using Edge = std::pair<NodeId, NodeId>;  // parent -> child

/// DAG over substantive variables (O, X) and response indicators (R).
///
/// Proxies are never nodes. Construction validates every structural rule:
/// unique nonempty names, edges between known nodes, one indicator per
/// partially observed variable, indicators without substantive children,
/// and acyclicity. Instances are immutable afterwards.
class MissingDataGraph {
public:
    MissingDataGraph() = default;
    MissingDataGraph(std::vector<Node> nodes, std::vector<Edge> edges);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    /// Nodes in declaration order.
    const std::vector<Node>& nodes() const { return nodes_; }
    /// Edges sorted by (parent, child).
    const std::vector<Edge>& edges() const { return edges_; }

    bool contains(std::string_view name) const;
    const NodeRole& role(std::string_view name) const;
    bool is_substantive(std::string_view name) const;
    bool is_partial(std::string_view name) const;
    bool is_indicator(std::string_view name) const;

    const NodeSet& parents(std::string_view name) const;
    const NodeSet& children(std::string_view name) const;
    bool has_edge(std::string_view parent, std::string_view child) const;

    /// Substantive nodes (O and X) in declaration order.
    std::vector<NodeId> substantive() const;
    std::vector<NodeId> partially_observed() const;
    std::vector<NodeId> indicators() const;
    /// Response indicator of a partially observed variable.
    const NodeId& indicator_of(std::string_view variable) const;

    /// Serializes back into the graph-description grammar accepted by parse_graph.
    std::string to_text() const;

    friend bool operator==(const MissingDataGraph& a, const MissingDataGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    std::size_t index(std::string_view name) const;

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::size_t, std::less<>> index_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::map<NodeId, NodeId, std::less<>> indicator_of_;
};

/// Parses the line-oriented graph description:
///
///     # comment
///     nodes:
///       X partial
///       A observed
///       R_X indicator X
///     edges:
///       A -> X
///       X -> R_X
///
/// Throws GraphError with a line number on malformed input or when the
/// resulting graph violates an invariant.
MissingDataGraph parse_graph(std::string_view text);
MissingDataGraph load_graph(const std::string& path);

/// True iff every path between A and B is blocked by Z. A, B, Z must be
/// disjoint sets of known nodes. Empty A or B is trivially separated.
bool d_separated(const MissingDataGraph& g, const NodeSet& a, const NodeSet& b,
                 const NodeSet& z);

/// Topological order with ties broken lexicographically by node name.
std::vector<NodeId> topological_order(const MissingDataGraph& g);

/// Observed / missing split of the partially observed variables for one row.
struct RowPattern {
    NodeSet observed;  // X1
    NodeSet missing;   // X0
    friend bool operator==(const RowPattern&, const RowPattern&) = default;
};

/// `indicator_values` maps each response indicator name (e.g. "R_X") to 0 or 1.
RowPattern row_pattern(const MissingDataGraph& g, const std::map<NodeId, int>& indicator_values);

}  // namespace mdi
