#pragma once

#include "mdimpute/dataset.hpp"
#include "mdimpute/graph.hpp"

#include <random>

namespace test_support {

// Correlated Gaussian columns with MCAR holes at a random rate per variable.
inline mdi::Dataset random_dataset(std::mt19937_64& gen, const mdi::MissingDataGraph& g, std::size_t n) {
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> rate(0.05, 0.3);
    std::uniform_real_distribution<double> u;
    mdi::Dataset d(n);
    std::vector<double> previous(n, 0.0);
    for (const auto& v : g.substantive()) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = 0.6 * previous[i] + z(gen);
        previous = values;
        if (!g.is_partial(v)) {
            d.add_observed(v, values);
            continue;
        }
        const double miss = rate(gen);
        std::vector<mdi::Cell> proxy(n);
        mdi::IndicatorColumn r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = u(gen) >= miss;
            if (r[i]) proxy[i] = values[i];
        }
        d.add_partial(v, g.indicator_of(v), std::move(proxy), std::move(r));
    }
    return d;
}

}  // namespace test_support
