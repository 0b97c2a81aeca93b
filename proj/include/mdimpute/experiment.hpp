#pragma once

#include "mdimpute/identify.hpp"
#include "mdimpute/preset.hpp"
#include "mdimpute/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdi {

enum class Method { MI, MIRI, Decomp, Plugin, CCA, ACA };

/// Identifiers used on the command line and in configs: mi, miri, decomp, plugin, cca, aca.
std::string method_id(Method m);
/// Column labels used in bias tables.
std::string method_label(Method m);
/// Throws SpecError for an unknown identifier.
Method parse_method(const std::string& id);

struct ExperimentConfig {
    Preset preset;
    std::size_t n = 200000;
    std::uint64_t seed = 1;
    std::vector<Method> methods;
    /// Methods came from "all": ordering-based methods are skipped (with a
    /// note) instead of failing when no ordering exists.
    bool all_methods = false;
    std::size_t m = 5;
    std::size_t iters = 5;
    std::optional<std::size_t> draws;  // plug-in sample size, defaults to n
    std::optional<Ordering> ordering;  // forced ordering; searched when absent
    bool prune = false;
    unsigned jobs = 1;
    OrderingSearchOptions search;
};

/// Config from a preset with its experiment defaults applied.
ExperimentConfig make_config(Preset preset);

struct ExperimentResult {
    EstimateTable table;
    std::optional<OrderingCertificate> certificate;
    std::vector<FactorizationTerm> terms;
    std::vector<std::string> notes;
};

/// Simulates the preset, runs every requested method and tabulates biases
/// against the analytic truth. Deterministic for a fixed config.
/// Throws OrderingError when an ordering-based method is requested and the
/// forced ordering fails or no ordering exists.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace mdi
