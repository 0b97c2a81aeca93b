#pragma once

#include "mdimpute/dataset.hpp"
#include "mdimpute/identify.hpp"
#include "mdimpute/regression.hpp"
#include "mdimpute/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace mdi {

/// Imputation target -> predictor columns (substantive variables and/or
/// indicator names).
using PredictorMatrix = std::map<NodeId, std::vector<NodeId>>;

/// Every incomplete variable predicted by all other substantive variables.
PredictorMatrix default_predictors(const Dataset& d);
/// default_predictors plus every response indicator except the target's own.
PredictorMatrix miri_predictors(const Dataset& d);

struct CompletedDataset {
    std::size_t imputation = 0;  // 1-based
    Frame values;                // substantive variables in dataset order, no NA
};

/// Chained-equations multiple imputation with Bayesian linear regression.
///
/// Each of the `m` chains starts by filling missing cells with random draws
/// from the observed values of the same column, then runs `iters` sweeps
/// over the incomplete variables in dataset order: fit on the rows where the
/// target is observed, draw parameters, re-impute its missing cells.
/// Observed cells are never changed. Chains use independent derived seeds
/// and run on up to `jobs` threads without affecting the result.
std::vector<CompletedDataset> impute_chained(const Dataset& d, const PredictorMatrix& pm, std::size_t m,
                                             std::size_t iters, std::uint64_t seed, unsigned jobs = 1);

/// impute_chained with miri_predictors(d).
std::vector<CompletedDataset> impute_miri(const Dataset& d, std::size_t m, std::size_t iters, std::uint64_t seed,
                                          unsigned jobs = 1);

/// Proxies after forcing a monotone pattern along an ordering: in each row,
/// every partially observed variable after the first missing one is set to NA.
struct MonotoneData {
    std::map<NodeId, std::vector<Cell>> proxies;
    std::map<NodeId, std::vector<std::uint8_t>> forced;  // 1 where an observed cell was nulled
};
MonotoneData force_monotone(const Dataset& d, const Ordering& ordering);

/// Decomposable imputation: force a monotone pattern, then impute each
/// variable in ordering sequence from its factorization term, fitted on the
/// rows where the term's required indicators are all 1. Forced cells are
/// overwritten by imputations.
std::vector<CompletedDataset> impute_decomposable(const Dataset& d, const OrderingCertificate& cert,
                                                  const std::vector<FactorizationTerm>& terms, std::size_t m,
                                                  std::uint64_t seed, unsigned jobs = 1);

/// Monte-Carlo sample from the identified target law: terms without
/// conditioning variables are bootstrapped from their fitting rows, the rest
/// drawn from least-squares Gaussian fits.
Frame plug_in_target_law(const Dataset& d, const std::vector<FactorizationTerm>& terms, std::size_t n_draws,
                         std::uint64_t seed);

/// Rows with every response indicator equal to 1.
std::vector<std::size_t> complete_cases(const Dataset& d);

/// Per statistic, the rows where all of its variables are observed.
std::map<StatisticId, std::vector<std::size_t>> available_cases(const Dataset& d,
                                                                const std::vector<StatisticId>& stats);

/// Statistics under pairwise deletion.
Estimates available_case_estimates(const Dataset& d, const std::vector<StatisticId>& stats);

}  // namespace mdi
