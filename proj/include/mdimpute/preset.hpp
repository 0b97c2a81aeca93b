#pragma once

#include "mdimpute/dataset.hpp"
#include "mdimpute/graph.hpp"
#include "mdimpute/identify.hpp"
#include "mdimpute/simulate.hpp"
#include "mdimpute/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mdi {

/// Experiment defaults carried by a config document; CLI flags override them.
struct ExperimentDefaults {
    std::optional<std::size_t> n, m, iters, draws;
    std::optional<std::uint64_t> seed;
    std::optional<Ordering> ordering;
    std::optional<bool> prune;
};

/// A fully wired model: graph, structural model, response mechanisms and
/// the default method list for its bias table.
struct Preset {
    std::string name;
    MissingDataGraph graph;
    SemSpec sem;
    ResponseSpec responses;
    std::vector<std::string> methods;
    ExperimentDefaults experiment;
    std::uint64_t spec_hash = 0;  // FNV-1a of the canonical model description
};

/// Resolves the "graph" field of a config document to graph-description text.
using GraphResolver = std::function<std::string(const std::string& reference)>;

/// Parses a JSON config document:
///
///     {
///       "name": "...",
///       "graph": "file.graph"  (or inline text containing "nodes:"),
///       "sem": {"X": {"intercept": 0, "coefficients": {"P": 1.0}, "sd": 1}, ...},
///       "responses": {"R_X": {"probability": 0.7},
///                     "R_Y": {"logistic": [{"coefficient": 1, "factors": ["X"]}]}},
///       "methods": ["mi", "miri", ...],
///       "experiment": {"n": ..., "seed": ..., "m": ..., "iters": ..., "draws": ...,
///                      "ordering": ["X", "Y"], "prune": false}
///     }
///
/// Throws SpecError (or GraphError) on malformed or inconsistent content.
Preset parse_preset(std::string_view json_text, const GraphResolver& resolve_graph);
/// Loads a config file; graph file references are relative to its directory.
Preset load_preset(const std::string& path);

/// Built-in examples 1-4 (the shipped fixture configs). Throws SpecError for other ids.
Preset builtin_preset(int id);
/// Text of a shipped fixture file (e.g. "fig2.graph", "example4.json").
std::string_view builtin_fixture(std::string_view name);

struct SimulatedData {
    Dataset data;       // what estimators see
    Frame complete;     // true values, provenance only
    IndicatorColumns indicators;
};

SimulatedData simulate_preset(const Preset& p, std::size_t n, std::uint64_t seed);

/// Analytic truth of the standard statistics over the substantive variables.
Estimates analytic_truth(const Preset& p, const std::vector<StatisticId>& stats);

struct BuiltinExample {
    MissingDataGraph graph;
    Dataset data;
    Frame complete;
    std::vector<StatisticId> statistics;
    Estimates truth;
};

BuiltinExample builtin_example(int id, std::size_t n, std::uint64_t seed);

}  // namespace mdi
