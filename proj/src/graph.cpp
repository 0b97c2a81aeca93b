#include "mdimpute/graph.hpp"

#include "mdimpute/error.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace mdi {

namespace {

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    if (name.find("->") != std::string_view::npos) return false;
    return std::none_of(name.begin(), name.end(), [](char c) {
        return c == ' ' || c == '\t' || c == ',' || c == '#' || c == ':';
    });
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// Kahn's algorithm over index-based adjacency, smallest name first.
std::vector<std::size_t> kahn(const std::vector<Node>& nodes,
                              const std::vector<std::vector<std::size_t>>& children) {
    std::vector<std::size_t> indegree(nodes.size(), 0);
    for (const auto& cs : children)
        for (auto c : cs) ++indegree[c];

    auto later = [&](std::size_t a, std::size_t b) { return nodes[a].name > nodes[b].name; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (indegree[i] == 0) ready.push(i);

    std::vector<std::size_t> order;
    order.reserve(nodes.size());
    while (!ready.empty()) {
        const auto v = ready.top();
        ready.pop();
        order.push_back(v);
        for (auto c : children[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    return order;
}

}  // namespace

MissingDataGraph::MissingDataGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!valid_name(n.name)) throw GraphError("invalid node name '" + n.name + "'");
        if (!index_.emplace(n.name, i).second) throw GraphError("duplicate node '" + n.name + "'");
    }
    for (const auto& n : nodes_) {
        if (n.role.kind != RoleKind::ResponseIndicator) {
            if (!n.role.owner.empty())
                throw GraphError("node '" + n.name + "' is not an indicator but has an owner");
            continue;
        }
        const auto it = index_.find(n.role.owner);
        if (n.role.owner.empty() || it == index_.end())
            throw GraphError("response indicator '" + n.name + "' has missing or unknown owner '" +
                             n.role.owner + "'");
        if (nodes_[it->second].role.kind != RoleKind::PartiallyObserved)
            throw GraphError("response indicator '" + n.name + "' owner '" + n.role.owner +
                             "' is not partially observed");
        if (!indicator_of_.emplace(n.role.owner, n.name).second)
            throw GraphError("partially observed variable '" + n.role.owner +
                             "' has more than one response indicator");
    }
    for (const auto& n : nodes_)
        if (n.role.kind == RoleKind::PartiallyObserved && !indicator_of_.contains(n.name))
            throw GraphError("partially observed variable '" + n.name + "' has no response indicator");

    parents_.resize(nodes_.size());
    children_.resize(nodes_.size());
    std::vector<std::vector<std::size_t>> child_index(nodes_.size());
    for (const auto& [p, c] : edges) {
        const auto pi = index_.find(p);
        const auto ci = index_.find(c);
        if (pi == index_.end()) throw GraphError("edge references unknown node '" + p + "'");
        if (ci == index_.end()) throw GraphError("edge references unknown node '" + c + "'");
        if (pi->second == ci->second) throw GraphError("cycle detected: self-loop on '" + p + "'");
        if (nodes_[pi->second].role.kind == RoleKind::ResponseIndicator &&
            nodes_[ci->second].role.kind != RoleKind::ResponseIndicator)
            throw GraphError("response indicator '" + p + "' cannot be a parent of substantive variable '" +
                             c + "'");
        if (!children_[pi->second].insert(c).second)
            throw GraphError("duplicate edge " + p + " -> " + c);
        parents_[ci->second].insert(p);
        child_index[pi->second].push_back(ci->second);
    }
    if (kahn(nodes_, child_index).size() != nodes_.size()) throw GraphError("cycle detected");

    edges_ = std::move(edges);
    std::sort(edges_.begin(), edges_.end());
}

std::size_t MissingDataGraph::index(std::string_view name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw GraphError("unknown node '" + std::string(name) + "'");
    return it->second;
}

bool MissingDataGraph::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

const NodeRole& MissingDataGraph::role(std::string_view name) const { return nodes_[index(name)].role; }

bool MissingDataGraph::is_substantive(std::string_view name) const {
    return role(name).kind != RoleKind::ResponseIndicator;
}
bool MissingDataGraph::is_partial(std::string_view name) const {
    return role(name).kind == RoleKind::PartiallyObserved;
}
bool MissingDataGraph::is_indicator(std::string_view name) const {
    return role(name).kind == RoleKind::ResponseIndicator;
}

const NodeSet& MissingDataGraph::parents(std::string_view name) const { return parents_[index(name)]; }
const NodeSet& MissingDataGraph::children(std::string_view name) const { return children_[index(name)]; }

bool MissingDataGraph::has_edge(std::string_view parent, std::string_view child) const {
    return children(parent).contains(std::string(child));
}

std::vector<NodeId> MissingDataGraph::substantive() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (n.role.kind != RoleKind::ResponseIndicator) out.push_back(n.name);
    return out;
}

std::vector<NodeId> MissingDataGraph::partially_observed() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (n.role.kind == RoleKind::PartiallyObserved) out.push_back(n.name);
    return out;
}

std::vector<NodeId> MissingDataGraph::indicators() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (n.role.kind == RoleKind::ResponseIndicator) out.push_back(n.name);
    return out;
}

const NodeId& MissingDataGraph::indicator_of(std::string_view variable) const {
    const auto it = indicator_of_.find(variable);
    if (it == indicator_of_.end())
        throw GraphError("'" + std::string(variable) + "' is not a partially observed variable");
    return it->second;
}

std::string MissingDataGraph::to_text() const {
    std::ostringstream out;
    out << "nodes:\n";
    for (const auto& n : nodes_) {
        out << "  " << n.name << ' ';
        switch (n.role.kind) {
            case RoleKind::FullyObserved: out << "observed"; break;
            case RoleKind::PartiallyObserved: out << "partial"; break;
            case RoleKind::ResponseIndicator: out << "indicator " << n.role.owner; break;
        }
        out << '\n';
    }
    out << "edges:\n";
    for (const auto& [p, c] : edges_) out << "  " << p << " -> " << c << '\n';
    return out.str();
}

MissingDataGraph parse_graph(std::string_view text) {
    enum class Section { None, Nodes, Edges } section = Section::None;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    bool saw_nodes = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto fail = [&](const std::string& msg) -> GraphError {
            return GraphError("line " + std::to_string(line_no) + ": " + msg);
        };

        if (line == "nodes:") {
            if (saw_nodes) throw fail("duplicate 'nodes:' section");
            section = Section::Nodes;
            saw_nodes = true;
            continue;
        }
        if (line == "edges:") {
            if (!saw_nodes) throw fail("'edges:' section before 'nodes:'");
            section = Section::Edges;
            continue;
        }

        if (section == Section::Nodes) {
            const auto tok = split_ws(line);
            if (tok.size() == 2 && tok[1] == "observed") {
                nodes.push_back({tok[0], NodeRole::observed()});
            } else if (tok.size() == 2 && tok[1] == "partial") {
                nodes.push_back({tok[0], NodeRole::partial()});
            } else if (tok.size() == 3 && tok[1] == "indicator") {
                nodes.push_back({tok[0], NodeRole::indicator(tok[2])});
            } else if (tok.size() == 2 && tok[1] == "indicator") {
                throw fail("response indicator '" + tok[0] + "' is missing its owner");
            } else {
                throw fail("expected '<name> observed|partial|indicator <owner>'");
            }
        } else if (section == Section::Edges) {
            const auto arrow = line.find("->");
            if (arrow == std::string_view::npos) throw fail("expected '<parent> -> <child>'");
            const auto parent = trim(line.substr(0, arrow));
            const auto child = trim(line.substr(arrow + 2));
            if (!valid_name(parent) || !valid_name(child)) throw fail("expected '<parent> -> <child>'");
            edges.emplace_back(std::string(parent), std::string(child));
        } else {
            throw fail("content outside of a 'nodes:' or 'edges:' section");
        }
    }
    if (!saw_nodes) throw GraphError("missing 'nodes:' section");
    return MissingDataGraph(std::move(nodes), std::move(edges));
}

MissingDataGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open graph file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

bool d_separated(const MissingDataGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& z) {
    for (const auto* set : {&a, &b, &z})
        for (const auto& n : *set)
            if (!g.contains(n)) throw GraphError("unknown node '" + n + "'");
    for (const auto& n : a)
        if (b.contains(n) || z.contains(n))
            throw GraphError("node sets are not disjoint (shared '" + n + "')");
    for (const auto& n : b)
        if (z.contains(n)) throw GraphError("node sets are not disjoint (shared '" + n + "')");
    if (a.empty() || b.empty()) return true;

    // Z together with its ancestors: colluders on these are unblocked.
    NodeSet z_ancestors;
    std::deque<NodeId> stack(z.begin(), z.end());
    while (!stack.empty()) {
        auto v = std::move(stack.front());
        stack.pop_front();
        if (!z_ancestors.insert(v).second) continue;
        for (const auto& p : g.parents(v)) stack.push_back(p);
    }

    // Reachability over (node, arrived-from-child?) states.
    enum Dir : int { Up = 0, Down = 1 };
    std::set<std::pair<NodeId, int>> visited;
    std::deque<std::pair<NodeId, int>> queue;
    for (const auto& n : a) queue.emplace_back(n, Up);

    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (!visited.emplace(v, dir).second) continue;
        const bool in_z = z.contains(v);
        if (!in_z && b.contains(v)) return false;

        if (dir == Up) {
            if (in_z) continue;
            for (const auto& p : g.parents(v)) queue.emplace_back(p, Up);
            for (const auto& c : g.children(v)) queue.emplace_back(c, Down);
        } else {
            if (!in_z)
                for (const auto& c : g.children(v)) queue.emplace_back(c, Down);
            if (z_ancestors.contains(v))
                for (const auto& p : g.parents(v)) queue.emplace_back(p, Up);
        }
    }
    return true;
}

std::vector<NodeId> topological_order(const MissingDataGraph& g) {
    const auto& nodes = g.nodes();
    std::map<NodeId, std::size_t, std::less<>> idx;
    for (std::size_t i = 0; i < nodes.size(); ++i) idx.emplace(nodes[i].name, i);
    std::vector<std::vector<std::size_t>> children(nodes.size());
    for (const auto& [p, c] : g.edges()) children[idx.at(p)].push_back(idx.at(c));

    std::vector<NodeId> out;
    for (auto i : kahn(nodes, children)) out.push_back(nodes[i].name);
    return out;
}

RowPattern row_pattern(const MissingDataGraph& g, const std::map<NodeId, int>& indicator_values) {
    RowPattern pattern;
    for (const auto& x : g.partially_observed()) {
        const auto& r = g.indicator_of(x);
        const auto it = indicator_values.find(r);
        if (it == indicator_values.end()) throw DataError("row has no value for indicator '" + r + "'");
        if (it->second == 1)
            pattern.observed.insert(x);
        else if (it->second == 0)
            pattern.missing.insert(x);
        else
            throw DataError("indicator '" + r + "' has value " + std::to_string(it->second) +
                            " (expected 0 or 1)");
    }
    return pattern;
}

}  // namespace mdi
