#include "mdimpute/impute.hpp"

#include "mdimpute/error.hpp"
#include "mdimpute/rng.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>

namespace mdi {

namespace {

// Runs body(i) for i in [0, count) on up to `jobs` threads; rethrows the
// first failure.
template <typename Body>
void run_parallel(std::size_t count, unsigned jobs, Body body) {
    const auto workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w)
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<std::size_t> rows_where(const std::vector<Cell>& cells, bool observed) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].has_value() == observed) out.push_back(i);
    return out;
}

// Design matrix [1, columns...] restricted to `rows`.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& work, const std::vector<Eigen::Index>& columns,
                              const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()) + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        const auto ii = static_cast<Eigen::Index>(i);
        x(ii, 0) = 1.0;
        for (std::size_t j = 0; j < columns.size(); ++j) x(ii, static_cast<Eigen::Index>(j) + 1) = work(r, columns[j]);
    }
    return x;
}

Eigen::VectorXd gather(const Eigen::MatrixXd& work, Eigen::Index column, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = work(static_cast<Eigen::Index>(rows[i]), column);
    return y;
}

// Substantive columns (dataset order) followed by indicator columns as 0/1.
struct Workspace {
    std::vector<NodeId> names;
    Eigen::MatrixXd values;

    Eigen::Index index(const NodeId& name) const {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw DataError("unknown column '" + name + "'");
        return static_cast<Eigen::Index>(it - names.begin());
    }
};

Workspace make_workspace(const Dataset& d, const std::map<NodeId, std::vector<Cell>>* override_proxies = nullptr) {
    Workspace w;
    w.names = d.variables();
    const auto indicators = d.indicator_names();
    w.names.insert(w.names.end(), indicators.begin(), indicators.end());
    w.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.rows()), static_cast<Eigen::Index>(w.names.size()));
    for (std::size_t j = 0; j < d.variables().size(); ++j) {
        const auto& v = d.variables()[j];
        const auto& cells = override_proxies ? override_proxies->at(v) : d.proxy(v);
        for (std::size_t i = 0; i < d.rows(); ++i)
            w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                cells[i] ? *cells[i] : std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t j = d.variables().size();
    for (const auto& v : d.variables()) {
        if (!d.is_partial(v)) continue;
        const auto& r = d.indicator(v);
        for (std::size_t i = 0; i < d.rows(); ++i)
            w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i];
        ++j;
    }
    return w;
}

Frame substantive_frame(const Dataset& d, const Workspace& w) {
    const auto k = static_cast<Eigen::Index>(d.variables().size());
    return Frame(d.variables(), w.values.leftCols(k));
}

// Fits on `fit_rows`, then fills `target` at `impute_rows` with draws.
void draw_and_fill(Workspace& w, Eigen::Index target, const std::vector<Eigen::Index>& predictors,
                   const std::vector<std::size_t>& fit_rows, const std::vector<std::size_t>& impute_rows, Rng& rng) {
    const auto x = design_matrix(w.values, predictors, fit_rows);
    const auto y = gather(w.values, target, fit_rows);
    const auto draw = bayes_linreg_draw(x, y, rng);
    const auto xm = design_matrix(w.values, predictors, impute_rows);
    const Eigen::VectorXd mean = xm * draw.coefficients;
    for (std::size_t i = 0; i < impute_rows.size(); ++i)
        w.values(static_cast<Eigen::Index>(impute_rows[i]), target) =
            mean[static_cast<Eigen::Index>(i)] + draw.sigma * rng.normal();
}

void check_counts(std::size_t m) {
    if (m == 0) throw DataError("number of imputations must be at least 1");
}

}  // namespace

PredictorMatrix default_predictors(const Dataset& d) {
    PredictorMatrix pm;
    for (const auto& target : d.variables()) {
        if (!d.is_partial(target)) continue;
        auto& preds = pm[target];
        for (const auto& v : d.variables())
            if (v != target) preds.push_back(v);
    }
    return pm;
}

PredictorMatrix miri_predictors(const Dataset& d) {
    auto pm = default_predictors(d);
    for (auto& [target, preds] : pm)
        for (const auto& r : d.indicator_names())
            if (r != d.indicator_name(target)) preds.push_back(r);
    return pm;
}

std::vector<CompletedDataset> impute_chained(const Dataset& d, const PredictorMatrix& pm, std::size_t m,
                                             std::size_t iters, std::uint64_t seed, unsigned jobs) {
    check_counts(m);
    if (iters == 0) throw DataError("number of iterations must be at least 1");

    const auto base = make_workspace(d);
    struct Target {
        Eigen::Index column;
        std::vector<Eigen::Index> predictors;
        std::vector<std::size_t> observed, missing;
    };
    std::vector<Target> targets;
    for (const auto& v : d.variables()) {
        const auto& cells = d.proxy(v);
        auto missing = rows_where(cells, false);
        if (missing.empty()) continue;
        auto observed = rows_where(cells, true);
        if (observed.empty()) throw DataError("variable '" + v + "' is entirely missing");
        const auto it = pm.find(v);
        if (it == pm.end()) throw DataError("no predictor set for incomplete variable '" + v + "'");
        Target t{base.index(v), {}, std::move(observed), std::move(missing)};
        for (const auto& p : it->second) {
            if (p == v) throw DataError("variable '" + v + "' cannot predict itself");
            if (d.is_partial(v) && p == d.indicator_name(v))
                throw DataError("variable '" + v + "' cannot be predicted by its own indicator");
            t.predictors.push_back(base.index(p));
        }
        targets.push_back(std::move(t));
    }

    std::vector<CompletedDataset> out(m);
    run_parallel(m, jobs, [&](std::size_t chain) {
        Rng rng(Rng::derive(seed, chain));
        Workspace w = base;
        for (const auto& t : targets)
            for (auto row : t.missing)
                w.values(static_cast<Eigen::Index>(row), t.column) =
                    w.values(static_cast<Eigen::Index>(t.observed[rng.index(t.observed.size())]), t.column);
        for (std::size_t it = 0; it < iters; ++it)
            for (const auto& t : targets) draw_and_fill(w, t.column, t.predictors, t.observed, t.missing, rng);
        out[chain] = {chain + 1, substantive_frame(d, w)};
    });
    return out;
}

std::vector<CompletedDataset> impute_miri(const Dataset& d, std::size_t m, std::size_t iters, std::uint64_t seed,
                                          unsigned jobs) {
    return impute_chained(d, miri_predictors(d), m, iters, seed, jobs);
}

MonotoneData force_monotone(const Dataset& d, const Ordering& ordering) {
    for (const auto& v : ordering)
        if (!d.contains(v)) throw DataError("ordering variable '" + v + "' is not in the dataset");
    if (ordering.size() != d.variables().size()) throw DataError("ordering does not cover every variable");

    MonotoneData out;
    for (const auto& v : d.variables()) {
        out.proxies[v] = d.proxy(v);
        out.forced[v].assign(d.rows(), 0);
    }
    for (std::size_t i = 0; i < d.rows(); ++i) {
        bool broken = false;
        for (const auto& v : ordering) {
            if (!d.is_partial(v)) continue;
            if (broken) {
                auto& cell = out.proxies[v][i];
                if (cell) {
                    cell.reset();
                    out.forced[v][i] = 1;
                }
            } else if (d.indicator(v)[i] == 0) {
                broken = true;
            }
        }
    }
    return out;
}

namespace {

std::map<NodeId, NodeId> indicator_owners(const Dataset& d) {
    std::map<NodeId, NodeId> owner;
    for (const auto& v : d.variables())
        if (d.is_partial(v)) owner[d.indicator_name(v)] = v;
    return owner;
}

// Rows where every required indicator of a term is 1.
std::vector<std::size_t> fitting_rows(const Dataset& d, const FactorizationTerm& term,
                                      const std::map<NodeId, NodeId>& owner) {
    std::vector<const IndicatorColumn*> cols;
    for (const auto& r : term.required_indicators) {
        const auto it = owner.find(r);
        if (it == owner.end()) throw DataError("dataset has no indicator '" + r + "'");
        cols.push_back(&d.indicator(it->second));
    }
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d.rows(); ++i)
        if (std::all_of(cols.begin(), cols.end(), [&](const auto* c) { return (*c)[i] == 1; })) rows.push_back(i);
    return rows;
}

void check_terms(const Dataset& d, const Ordering& ordering, const std::vector<FactorizationTerm>& terms) {
    if (terms.size() != ordering.size()) throw OrderingError("factorization terms do not match the ordering");
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (terms[k].target != ordering[k]) throw OrderingError("factorization terms do not follow the ordering");
        if (!d.contains(terms[k].target)) throw DataError("dataset has no variable '" + terms[k].target + "'");
        for (const auto& c : terms[k].conditioning)
            if (std::find(ordering.begin(), ordering.begin() + static_cast<long>(k), c) ==
                ordering.begin() + static_cast<long>(k))
                throw OrderingError("term for '" + terms[k].target + "' conditions on a non-predecessor '" + c + "'");
    }
}

}  // namespace

std::vector<CompletedDataset> impute_decomposable(const Dataset& d, const OrderingCertificate& cert,
                                                  const std::vector<FactorizationTerm>& terms, std::size_t m,
                                                  std::uint64_t seed, unsigned jobs) {
    check_counts(m);
    if (const auto* f = cert.first_failure())
        throw OrderingError("invalid certificate: " + describe(*f) + " does not hold");
    check_terms(d, cert.ordering, terms);

    const auto monotone = force_monotone(d, cert.ordering);
    const auto base = make_workspace(d, &monotone.proxies);
    const auto owner = indicator_owners(d);

    struct Step {
        Eigen::Index column;
        std::vector<Eigen::Index> predictors;
        std::vector<std::size_t> fit, impute;
    };
    std::vector<Step> steps;
    for (const auto& term : terms) {
        auto impute = rows_where(monotone.proxies.at(term.target), false);
        if (impute.empty()) continue;
        Step s{base.index(term.target), {}, fitting_rows(d, term, owner), std::move(impute)};
        for (const auto& c : term.conditioning) s.predictors.push_back(base.index(c));
        if (s.fit.size() < s.predictors.size() + 3)
            throw DataError("too few rows to fit " + describe(term) + " (positivity violated in sample)");
        steps.push_back(std::move(s));
    }

    std::vector<CompletedDataset> out(m);
    run_parallel(m, jobs, [&](std::size_t chain) {
        Rng rng(Rng::derive(seed, chain));
        Workspace w = base;
        for (const auto& s : steps) draw_and_fill(w, s.column, s.predictors, s.fit, s.impute, rng);
        out[chain] = {chain + 1, substantive_frame(d, w)};
    });
    return out;
}

Frame plug_in_target_law(const Dataset& d, const std::vector<FactorizationTerm>& terms, std::size_t n_draws,
                         std::uint64_t seed) {
    Ordering ordering;
    for (const auto& t : terms) ordering.push_back(t.target);
    check_terms(d, ordering, terms);
    {
        auto a = ordering;
        auto b = d.variables();
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw OrderingError("factorization does not cover every dataset variable");
    }

    const auto owner = indicator_owners(d);
    const auto source = make_workspace(d);
    Frame out(d.variables(), static_cast<Eigen::Index>(n_draws));
    Rng rng(Rng::derive(seed, "plug-in"));

    for (const auto& term : terms) {
        const auto rows = fitting_rows(d, term, owner);
        const auto target = source.index(term.target);
        auto dest = out.col(term.target);
        if (term.conditioning.empty()) {
            if (rows.empty()) throw DataError("no rows to fit " + describe(term) + " (positivity violated in sample)");
            for (Eigen::Index i = 0; i < dest.size(); ++i)
                dest[i] = source.values(static_cast<Eigen::Index>(rows[rng.index(rows.size())]), target);
            continue;
        }
        std::vector<Eigen::Index> predictors;
        for (const auto& c : term.conditioning) predictors.push_back(source.index(c));
        if (rows.size() < predictors.size() + 3)
            throw DataError("too few rows to fit " + describe(term) + " (positivity violated in sample)");
        const auto fit = ols_fit(design_matrix(source.values, predictors, rows), gather(source.values, target, rows));

        Eigen::VectorXd mean = Eigen::VectorXd::Constant(dest.size(), fit.coefficients[0]);
        for (std::size_t j = 0; j < term.conditioning.size(); ++j)
            mean += fit.coefficients[static_cast<Eigen::Index>(j) + 1] * out.col(term.conditioning[j]);
        for (Eigen::Index i = 0; i < dest.size(); ++i) dest[i] = mean[i] + fit.sigma * rng.normal();
    }
    return out;
}

std::vector<std::size_t> complete_cases(const Dataset& d) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        bool all = true;
        for (const auto& v : d.variables())
            if (d.is_partial(v) && d.indicator(v)[i] == 0) {
                all = false;
                break;
            }
        if (all) rows.push_back(i);
    }
    return rows;
}

std::map<StatisticId, std::vector<std::size_t>> available_cases(const Dataset& d,
                                                                const std::vector<StatisticId>& stats) {
    std::map<StatisticId, std::vector<std::size_t>> out;
    for (const auto& s : stats) {
        const auto vars = s.variables();
        auto& rows = out[s];
        for (std::size_t i = 0; i < d.rows(); ++i)
            if (std::all_of(vars.begin(), vars.end(), [&](const auto& v) { return d.observed(v, i); }))
                rows.push_back(i);
    }
    return out;
}

Estimates available_case_estimates(const Dataset& d, const std::vector<StatisticId>& stats) {
    Estimates out;
    for (const auto& [s, rows] : available_cases(d, stats)) {
        const auto f = d.frame(rows, s.variables());
        out[s] = summarize(f, {s}).at(s);
    }
    return out;
}

}  // namespace mdi
