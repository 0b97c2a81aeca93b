#include "mdimpute/experiment.hpp"

#include "mdimpute/error.hpp"
#include "mdimpute/impute.hpp"
#include "mdimpute/rng.hpp"

#include <algorithm>

namespace mdi {

std::string method_id(Method m) {
    switch (m) {
        case Method::MI: return "mi";
        case Method::MIRI: return "miri";
        case Method::Decomp: return "decomp";
        case Method::Plugin: return "plugin";
        case Method::CCA: return "cca";
        case Method::ACA: return "aca";
    }
    return {};
}

std::string method_label(Method m) {
    switch (m) {
        case Method::MI: return "MI";
        case Method::MIRI: return "MIRI";
        case Method::Decomp: return "decompMI";
        case Method::Plugin: return "Plug-in";
        case Method::CCA: return "CCA";
        case Method::ACA: return "ACA";
    }
    return {};
}

Method parse_method(const std::string& id) {
    for (auto m : {Method::MI, Method::MIRI, Method::Decomp, Method::Plugin, Method::CCA, Method::ACA})
        if (method_id(m) == id) return m;
    throw SpecError("unknown method '" + id + "' (expected mi, miri, decomp, plugin, cca or aca)");
}

ExperimentConfig make_config(Preset preset) {
    ExperimentConfig c;
    for (const auto& id : preset.methods) c.methods.push_back(parse_method(id));
    const auto& e = preset.experiment;
    if (e.n) c.n = *e.n;
    if (e.seed) c.seed = *e.seed;
    if (e.m) c.m = *e.m;
    if (e.iters) c.iters = *e.iters;
    c.draws = e.draws;
    c.ordering = e.ordering;
    if (e.prune) c.prune = *e.prune;
    c.preset = std::move(preset);
    return c;
}

namespace {

bool needs_ordering(Method m) { return m == Method::Decomp || m == Method::Plugin; }

Estimates pooled(const std::vector<CompletedDataset>& completed, const std::vector<StatisticId>& stats) {
    std::vector<Estimates> per;
    for (const auto& c : completed) per.push_back(summarize(c.values, stats));
    return pool(std::span<const Estimates>(per));
}

std::string identification_diagnosis(const MissingDataGraph& g) {
    const auto decision = full_law_identifiable(g);
    if (decision.identifiable) return "full law identifiable";
    std::string out = "full law not identifiable (";
    for (std::size_t i = 0; i < decision.witnesses.size(); ++i)
        out += (i ? "; " : "") + describe(decision.witnesses[i]);
    return out + ")";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.methods.empty()) throw SpecError("no methods requested");
    const auto& g = config.preset.graph;
    ExperimentResult result;

    std::vector<Method> methods;
    for (auto m : config.methods)
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);

    const bool any_ordering = std::any_of(methods.begin(), methods.end(), needs_ordering);
    if (any_ordering) {
        if (config.ordering) {
            auto cert = verify_ordering(g, *config.ordering);
            if (const auto* f = cert.first_failure())
                throw OrderingError("ordering rejected: " + describe(*f) + " does not hold");
            result.certificate = std::move(cert);
        } else {
            result.certificate = find_decomposable_ordering(g, config.search);
        }
        if (result.certificate) {
            result.terms = target_law_factorization(g, *result.certificate, config.prune);
        } else if (config.all_methods) {
            std::erase_if(methods, needs_ordering);
            result.notes.push_back("no decomposable ordering exists; decomp and plugin skipped");
        } else {
            throw OrderingError("no decomposable ordering exists; " + identification_diagnosis(g));
        }
    }

    const auto sim = simulate_preset(config.preset, config.n, config.seed);
    const auto& d = sim.data;
    const auto stats = standard_statistics(g.substantive());
    const auto truth = analytic_truth(config.preset, stats);

    std::vector<MethodEstimates> columns;
    for (auto m : methods) {
        const auto seed = Rng::derive(config.seed, method_id(m));
        Estimates est;
        switch (m) {
            case Method::MI:
                est = pooled(impute_chained(d, default_predictors(d), config.m, config.iters, seed, config.jobs), stats);
                break;
            case Method::MIRI:
                est = pooled(impute_miri(d, config.m, config.iters, seed, config.jobs), stats);
                break;
            case Method::Decomp:
                est = pooled(impute_decomposable(d, *result.certificate, result.terms, config.m, seed, config.jobs),
                             stats);
                break;
            case Method::Plugin:
                est = summarize(plug_in_target_law(d, result.terms, config.draws.value_or(config.n), seed), stats);
                break;
            case Method::CCA: {
                const auto rows = complete_cases(d);
                est = summarize(d.frame(rows), stats);
                break;
            }
            case Method::ACA: est = available_case_estimates(d, stats); break;
        }
        columns.push_back({method_label(m), std::move(est)});
    }
    result.table = bias_table(stats, truth, columns);
    return result;
}

}  // namespace mdi
