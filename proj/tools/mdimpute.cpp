// mdimpute: identifiability checks, ordering search, simulation, imputation
// and bias-table experiments for graphical missing-data models.
//
// Exit codes: 0 success (check: identifiable; order: valid ordering),
// 1 negative answer (check: not identifiable; order/experiment: no usable
// ordering), 2 input or usage error.

#include "mdimpute/error.hpp"
#include "mdimpute/experiment.hpp"
#include "mdimpute/graph.hpp"
#include "mdimpute/identify.hpp"
#include "mdimpute/impute.hpp"
#include "mdimpute/preset.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

struct Source {
    std::string graph_file;
    std::string config_file;
    int example = 0;

    void add_to(CLI::App* cmd, bool with_graph) {
        if (with_graph) cmd->add_option("--graph", graph_file, "Graph description file")->check(CLI::ExistingFile);
        cmd->add_option("--config", config_file, "Model/experiment config (JSON)")->check(CLI::ExistingFile);
        cmd->add_option("--example", example, "Built-in example 1-4")->check(CLI::Range(1, 4));
    }

    bool has_preset() const { return !config_file.empty() || example != 0; }

    mdi::Preset preset() const {
        if (!config_file.empty() && example != 0) throw mdi::SpecError("use either --config or --example, not both");
        if (!config_file.empty()) return mdi::load_preset(config_file);
        if (example != 0) return mdi::builtin_preset(example);
        throw mdi::SpecError("one of --config or --example is required");
    }

    mdi::MissingDataGraph graph() const {
        const int given = !graph_file.empty() + !config_file.empty() + (example != 0);
        if (given != 1) throw mdi::SpecError("exactly one of --graph, --config or --example is required");
        if (!graph_file.empty()) return mdi::load_graph(graph_file);
        return preset().graph;
    }
};

std::optional<mdi::Ordering> parse_ordering(const std::string& text) {
    if (text.empty()) return std::nullopt;
    mdi::Ordering out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" <");
        const auto last = item.find_last_not_of(" <");
        if (first == std::string::npos) throw mdi::SpecError("empty name in --ordering");
        out.push_back(item.substr(first, last - first + 1));
    }
    return out;
}

mdi::OrderingSearchOptions search_options() {
    mdi::OrderingSearchOptions opt;
    if (const char* cap = std::getenv("MDI_MAX_ORDER_VARS")) {
        try {
            opt.hard_cap = std::stoul(cap);
        } catch (const std::exception&) {
            throw mdi::SpecError(std::string("MDI_MAX_ORDER_VARS is not a number: ") + cap);
        }
    }
    return opt;
}

std::string join(const mdi::Ordering& o, const char* sep) {
    std::string s;
    for (const auto& v : o) s += (s.empty() ? "" : sep) + v;
    return s;
}

void print_certificate(const mdi::OrderingCertificate& cert) {
    std::cout << "ordering: " << join(cert.ordering, " < ") << '\n';
    for (const auto& c : cert.checks) std::cout << (c.holds ? "  [ok]   " : "  [FAIL] ") << mdi::describe(c) << '\n';
    std::cout << (cert.valid() ? "valid" : "invalid") << '\n';
}

int cmd_check(const Source& src) {
    const auto g = src.graph();
    const auto decision = mdi::full_law_identifiable(g);
    if (decision.identifiable) {
        std::cout << "identifiable\n";
        return kOk;
    }
    std::cout << "not identifiable\n";
    for (const auto& w : decision.witnesses) std::cout << "  " << mdi::describe(w) << '\n';
    return kNegative;
}

int cmd_order(const Source& src, const std::string& ordering_text, bool prune) {
    const auto g = src.graph();
    std::optional<mdi::OrderingCertificate> cert;
    if (const auto forced = parse_ordering(ordering_text))
        cert = mdi::verify_ordering(g, *forced);
    else
        cert = mdi::find_decomposable_ordering(g, search_options());

    if (!cert) {
        std::cout << "no decomposable ordering exists\n";
        return kNegative;
    }
    print_certificate(*cert);
    if (!cert->valid()) return kNegative;
    std::cout << "factorization:\n";
    for (const auto& t : mdi::target_law_factorization(g, *cert, prune)) std::cout << "  " << mdi::describe(t) << '\n';
    return kOk;
}

std::string to_string(const auto& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

int cmd_simulate(const Source& src, std::size_t n, std::optional<std::uint64_t> seed_flag, const std::string& out) {
    const auto preset = src.preset();
    const auto seed = seed_flag.value_or(preset.experiment.seed.value_or(1));
    const auto sim = mdi::simulate_preset(preset, n, seed);

    mdi::write_file_atomic(out + ".csv", to_string([&](std::ostream& o) { mdi::write_dataset_csv(o, sim.data); }));
    mdi::write_file_atomic(out + "_truth.csv",
                           to_string([&](std::ostream& o) { mdi::write_frame_csv(o, sim.complete); }));
    const nlohmann::json provenance{{"model", preset.name},
                                    {"spec_hash", sim.data.provenance.spec_hash},
                                    {"seed", sim.data.provenance.seed},
                                    {"n", n},
                                    {"rng", "mdi-rng v" + std::to_string(mdi::Rng::version)}};
    mdi::write_file_atomic(out + "_provenance.json", provenance.dump(2) + "\n");
    std::cout << "wrote " << out << ".csv, " << out << "_truth.csv, " << out << "_provenance.json\n";
    return kOk;
}

struct ImputeArgs {
    std::string data;
    std::string method = "mi";
    std::size_t m = 5;
    std::size_t iters = 5;
    std::optional<std::size_t> draws;
    std::uint64_t seed = 1;
    std::string ordering;
    bool prune = false;
    std::string out;
    unsigned jobs = 1;
};

int cmd_impute(const Source& src, const ImputeArgs& a) {
    const auto g = src.graph();
    std::ifstream in(a.data);
    if (!in) throw mdi::DataError("cannot open '" + a.data + "'");
    const auto d = mdi::read_dataset_csv(in, g);
    const auto method = mdi::parse_method(a.method);

    auto write_completed = [&](const std::vector<mdi::CompletedDataset>& completed) {
        for (const auto& c : completed) {
            const auto path = a.out + "_m" + std::to_string(c.imputation) + ".csv";
            mdi::write_file_atomic(path, to_string([&](std::ostream& o) { mdi::write_frame_csv(o, c.values, d); }));
            std::cout << "wrote " << path << '\n';
        }
    };
    auto certificate = [&]() {
        std::optional<mdi::OrderingCertificate> cert;
        if (const auto forced = parse_ordering(a.ordering))
            cert = mdi::verify_ordering(g, *forced);
        else
            cert = mdi::find_decomposable_ordering(g, search_options());
        if (!cert) throw mdi::OrderingError("no decomposable ordering exists");
        if (const auto* f = cert->first_failure())
            throw mdi::OrderingError("ordering rejected: " + mdi::describe(*f) + " does not hold");
        return *cert;
    };

    switch (method) {
        case mdi::Method::MI:
            write_completed(mdi::impute_chained(d, mdi::default_predictors(d), a.m, a.iters, a.seed, a.jobs));
            break;
        case mdi::Method::MIRI: write_completed(mdi::impute_miri(d, a.m, a.iters, a.seed, a.jobs)); break;
        case mdi::Method::Decomp: {
            const auto cert = certificate();
            const auto terms = mdi::target_law_factorization(g, cert, a.prune);
            write_completed(mdi::impute_decomposable(d, cert, terms, a.m, a.seed, a.jobs));
            break;
        }
        case mdi::Method::Plugin: {
            const auto cert = certificate();
            const auto terms = mdi::target_law_factorization(g, cert, a.prune);
            const auto sample = mdi::plug_in_target_law(d, terms, a.draws.value_or(d.rows()), a.seed);
            const auto path = a.out + "_draws.csv";
            mdi::write_file_atomic(path, to_string([&](std::ostream& o) { mdi::write_frame_csv(o, sample); }));
            std::cout << "wrote " << path << '\n';
            break;
        }
        case mdi::Method::CCA: {
            const auto rows = mdi::complete_cases(d);
            const auto path = a.out + "_cca.csv";
            mdi::write_file_atomic(path, to_string([&](std::ostream& o) { mdi::write_frame_csv(o, d.frame(rows)); }));
            std::cout << "wrote " << path << '\n';
            break;
        }
        case mdi::Method::ACA:
            throw mdi::SpecError("aca is a per-statistic estimator and produces no completed dataset; use 'experiment'");
    }
    return kOk;
}

struct ExperimentArgs {
    std::optional<std::size_t> n, m, iters, draws;
    std::optional<std::uint64_t> seed;
    std::string methods;
    std::string ordering;
    bool prune = false;
    std::string out;
    unsigned jobs = 1;
};

int cmd_experiment(const Source& src, const ExperimentArgs& a) {
    auto config = mdi::make_config(src.preset());
    if (a.n) config.n = *a.n;
    if (a.seed) config.seed = *a.seed;
    if (a.m) config.m = *a.m;
    if (a.iters) config.iters = *a.iters;
    if (a.draws) config.draws = *a.draws;
    if (a.prune) config.prune = true;
    if (const auto o = parse_ordering(a.ordering)) config.ordering = o;
    config.jobs = a.jobs;
    config.search = search_options();
    if (a.methods == "all") {
        config.methods = {mdi::Method::MI,  mdi::Method::MIRI,   mdi::Method::CCA,
                          mdi::Method::ACA, mdi::Method::Plugin, mdi::Method::Decomp};
        config.all_methods = true;
    } else if (!a.methods.empty()) {
        config.methods.clear();
        std::stringstream in(a.methods);
        std::string id;
        while (std::getline(in, id, ',')) config.methods.push_back(mdi::parse_method(id));
    }

    const auto result = mdi::run_experiment(config);
    std::cout << "model: " << config.preset.name << "  n=" << config.n << "  seed=" << config.seed
              << "  m=" << config.m << "  iters=" << config.iters << '\n';
    if (result.certificate) {
        std::cout << "ordering: " << join(result.certificate->ordering, " < ") << '\n';
        for (const auto& t : result.terms) std::cout << "  " << mdi::describe(t) << '\n';
    }
    for (const auto& note : result.notes) std::cout << "note: " << note << '\n';
    std::cout << '\n' << result.table.to_markdown();
    if (!a.out.empty()) {
        mdi::write_file_atomic(a.out + ".csv", result.table.to_csv());
        mdi::write_file_atomic(a.out + ".md", result.table.to_markdown());
        std::cout << "\nwrote " << a.out << ".csv, " << a.out << ".md\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identifiability checks and imputation experiments for graphical missing-data models"};
    app.require_subcommand(1);

    Source check_src, order_src, sim_src, imp_src, exp_src;

    auto* check = app.add_subcommand("check", "Decide full-law identifiability and list witnesses");
    check_src.add_to(check, true);

    std::string order_ordering;
    bool order_prune = false;
    auto* order = app.add_subcommand("order", "Find or verify a decomposable-imputation ordering");
    order_src.add_to(order, true);
    order->add_option("--ordering", order_ordering, "Verify this ordering instead of searching (e.g. X,Y)");
    order->add_flag("--prune", order_prune, "Drop conditioning variables using d-separation");

    std::size_t sim_n = 200000;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Simulate a dataset from a model config");
    sim_src.add_to(simulate, false);
    simulate->add_option("--n", sim_n, "Number of rows")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_seed, "Random seed");
    simulate->add_option("--out", sim_out, "Output path prefix")->required();

    ImputeArgs imp;
    auto* impute = app.add_subcommand("impute", "Impute a dataset CSV");
    imp_src.add_to(impute, true);
    impute->add_option("--data", imp.data, "Dataset CSV (X_star / R_X columns)")->required()->check(CLI::ExistingFile);
    impute->add_option("--method", imp.method, "mi, miri, decomp, plugin or cca");
    impute->add_option("--m", imp.m, "Number of imputations")->check(CLI::PositiveNumber);
    impute->add_option("--iters", imp.iters, "Chained-equation sweeps")->check(CLI::PositiveNumber);
    impute->add_option("--draws", imp.draws, "Plug-in sample size (default: rows)");
    impute->add_option("--seed", imp.seed, "Random seed");
    impute->add_option("--ordering", imp.ordering, "Ordering for decomp/plugin (searched when absent)");
    impute->add_flag("--prune", imp.prune, "Prune conditioning sets");
    impute->add_option("--out", imp.out, "Output path prefix")->required();
    impute->add_option("--jobs", imp.jobs, "Threads for independent chains")->check(CLI::PositiveNumber);

    ExperimentArgs ex;
    auto* experiment = app.add_subcommand("experiment", "Simulate, run estimators and tabulate biases");
    exp_src.add_to(experiment, false);
    experiment->add_option("--n", ex.n, "Number of rows (default 200000)")->check(CLI::PositiveNumber);
    experiment->add_option("--seed", ex.seed, "Random seed");
    experiment->add_option("--methods,--method", ex.methods,
                           "Comma-separated: mi,miri,decomp,plugin,cca,aca, or 'all' (default: the model's list)");
    experiment->add_option("--m", ex.m, "Number of imputations")->check(CLI::PositiveNumber);
    experiment->add_option("--iters", ex.iters, "Chained-equation sweeps")->check(CLI::PositiveNumber);
    experiment->add_option("--draws", ex.draws, "Plug-in sample size (default: n)");
    experiment->add_option("--ordering", ex.ordering, "Force this ordering for decomp/plugin");
    experiment->add_flag("--prune", ex.prune, "Prune conditioning sets");
    experiment->add_option("--out", ex.out, "Write <out>.csv and <out>.md");
    experiment->add_option("--jobs", ex.jobs, "Threads for independent chains")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*check) return cmd_check(check_src);
        if (*order) return cmd_order(order_src, order_ordering, order_prune);
        if (*simulate) return cmd_simulate(sim_src, sim_n, sim_seed, sim_out);
        if (*impute) return cmd_impute(imp_src, imp);
        if (*experiment) return cmd_experiment(exp_src, ex);
    } catch (const mdi::OrderingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNegative;
    } catch (const mdi::SizeLimitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
