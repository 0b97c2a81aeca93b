#include "mdimpute/preset.hpp"

#include "mdimpute/error.hpp"
#include "mdimpute/rng.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

namespace mdi {

namespace {

using nlohmann::json;

struct Fixture {
    std::string_view name;
    std::string_view text;
};

constexpr Fixture kFixtures[] = {
#include "mdimpute_fixtures.inc"
};

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SpecError(where + ": field '" + key + "': " + e.what());
    }
}

StructuralEquation parse_equation(const json& j, const std::string& var) {
    if (!j.is_object()) throw SpecError("sem." + var + " must be an object");
    StructuralEquation eq;
    eq.intercept = j.value("intercept", 0.0);
    eq.sd = get_field<double>(j, "sd", "sem." + var);
    if (j.contains("coefficients")) {
        const auto& c = j.at("coefficients");
        if (!c.is_object()) throw SpecError("sem." + var + ".coefficients must be an object");
        for (const auto& [parent, value] : c.items()) {
            if (!value.is_number()) throw SpecError("sem." + var + ".coefficients." + parent + " must be a number");
            eq.coefficients[parent] = value.get<double>();
        }
    }
    for (const auto& [key, _] : j.items())
        if (key != "intercept" && key != "sd" && key != "coefficients")
            throw SpecError("sem." + var + ": unknown field '" + key + "'");
    return eq;
}

ResponseModel parse_response(const json& j, const std::string& r) {
    if (!j.is_object() || j.size() != 1)
        throw SpecError("responses." + r + " must have exactly one of 'probability' or 'logistic'");
    if (j.contains("probability")) return ConstantProb{get_field<double>(j, "probability", "responses." + r)};
    if (!j.contains("logistic")) throw SpecError("responses." + r + " must have 'probability' or 'logistic'");
    const auto& terms = j.at("logistic");
    if (!terms.is_array()) throw SpecError("responses." + r + ".logistic must be an array");
    Logistic model;
    for (const auto& t : terms) {
        ResponseTerm term;
        term.coefficient = get_field<double>(t, "coefficient", "responses." + r);
        term.factors = t.value("factors", std::vector<std::string>{});
        model.terms.push_back(std::move(term));
    }
    return model;
}

json canonical(const Preset& p) {
    json sem = json::object();
    for (const auto& [v, eq] : p.sem.equations())
        sem[v] = {{"intercept", eq.intercept}, {"coefficients", eq.coefficients}, {"sd", eq.sd}};
    json resp = json::object();
    for (const auto& [r, m] : p.responses.models()) {
        if (const auto* c = std::get_if<ConstantProb>(&m)) {
            resp[r] = {{"probability", c->p}};
        } else {
            json terms = json::array();
            for (const auto& t : std::get<Logistic>(m).terms)
                terms.push_back({{"coefficient", t.coefficient}, {"factors", t.factors}});
            resp[r] = {{"logistic", terms}};
        }
    }
    return {{"graph", p.graph.to_text()}, {"sem", sem}, {"responses", resp}};
}

const std::vector<std::string> kKnownMethods{"mi", "miri", "decomp", "plugin", "cca", "aca"};

}  // namespace

Preset parse_preset(std::string_view json_text, const GraphResolver& resolve_graph) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("config must be a JSON object");

    Preset p;
    p.name = j.value("name", std::string("custom"));
    const auto graph_ref = get_field<std::string>(j, "graph", "config");
    p.graph = parse_graph(graph_ref.find("nodes:") != std::string::npos ? graph_ref : resolve_graph(graph_ref));

    const auto& sem = j.at("sem");
    if (!sem.is_object()) throw SpecError("'sem' must be an object");
    for (const auto& [v, eq] : sem.items()) p.sem.set(v, parse_equation(eq, v));
    p.sem.validate(p.graph);

    const auto& resp = j.at("responses");
    if (!resp.is_object()) throw SpecError("'responses' must be an object");
    for (const auto& [r, m] : resp.items()) p.responses.set(r, parse_response(m, r));
    p.responses.validate(p.graph);

    p.methods = j.value("methods", kKnownMethods);
    for (const auto& m : p.methods)
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end())
            throw SpecError("unknown method '" + m + "'");

    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        if (!e.is_object()) throw SpecError("'experiment' must be an object");
        try {
            if (e.contains("n")) p.experiment.n = e.at("n").get<std::size_t>();
            if (e.contains("seed")) p.experiment.seed = e.at("seed").get<std::uint64_t>();
            if (e.contains("m")) p.experiment.m = e.at("m").get<std::size_t>();
            if (e.contains("iters")) p.experiment.iters = e.at("iters").get<std::size_t>();
            if (e.contains("draws")) p.experiment.draws = e.at("draws").get<std::size_t>();
            if (e.contains("ordering")) p.experiment.ordering = e.at("ordering").get<Ordering>();
            if (e.contains("prune")) p.experiment.prune = e.at("prune").get<bool>();
        } catch (const json::exception& ex) {
            throw SpecError(std::string("'experiment': ") + ex.what());
        }
    }

    p.spec_hash = Rng::fnv1a(canonical(p).dump());
    return p;
}

Preset load_preset(const std::string& path) {
    const std::filesystem::path file(path);
    const auto dir = file.parent_path();
    return parse_preset(read_text(file), [&](const std::string& ref) { return read_text(dir / ref); });
}

std::string_view builtin_fixture(std::string_view name) {
    for (const auto& f : kFixtures)
        if (f.name == name) return f.text;
    throw SpecError("no built-in fixture '" + std::string(name) + "'");
}

Preset builtin_preset(int id) {
    if (id < 1 || id > 4) throw SpecError("unknown example id " + std::to_string(id) + " (expected 1-4)");
    const auto name = "example" + std::to_string(id) + ".json";
    return parse_preset(builtin_fixture(name), [](const std::string& ref) { return std::string(builtin_fixture(ref)); });
}

SimulatedData simulate_preset(const Preset& p, std::size_t n, std::uint64_t seed) {
    SimulatedData s;
    s.complete = simulate_complete(p.sem, p.graph, n, seed);
    s.indicators = simulate_responses(p.responses, p.graph, s.complete, seed);
    s.data = apply_mask(p.graph, s.complete, s.indicators);
    s.data.provenance = {p.spec_hash, seed};
    return s;
}

Estimates analytic_truth(const Preset& p, const std::vector<StatisticId>& stats) {
    const auto m = implied_moments(p.sem, p.graph);
    return summarize(m.names, m.mean, m.covariance, stats);
}

BuiltinExample builtin_example(int id, std::size_t n, std::uint64_t seed) {
    const auto p = builtin_preset(id);
    auto sim = simulate_preset(p, n, seed);
    BuiltinExample out{p.graph, std::move(sim.data), std::move(sim.complete), standard_statistics(p.graph.substantive()),
                       {}};
    out.truth = analytic_truth(p, out.statistics);
    return out;
}

}  // namespace mdi
