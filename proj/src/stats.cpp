#include "mdimpute/stats.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

namespace mdi {

StatisticId StatisticId::corr(NodeId x, NodeId y) {
    if (x == y) throw SpecError("correlation requires two distinct variables (got '" + x + "' twice)");
    return {StatKind::Corr, std::move(x), std::move(y)};
}

std::vector<NodeId> StatisticId::variables() const {
    if (kind_ == StatKind::Corr) return {first_, second_};
    return {first_};
}

std::string StatisticId::label() const {
    switch (kind_) {
        case StatKind::Mean: return "E(" + first_ + ")";
        case StatKind::Sd: return "sd(" + first_ + ")";
        case StatKind::Corr: return "Cor(" + first_ + "," + second_ + ")";
    }
    return {};
}

std::vector<StatisticId> standard_statistics(const std::vector<NodeId>& variables) {
    std::vector<StatisticId> out;
    for (const auto& v : variables) out.push_back(StatisticId::mean(v));
    for (const auto& v : variables) out.push_back(StatisticId::sd(v));
    for (std::size_t i = 0; i < variables.size(); ++i)
        for (std::size_t j = i + 1; j < variables.size(); ++j)
            out.push_back(StatisticId::corr(variables[i], variables[j]));
    return out;
}

Estimates summarize(const Frame& sample, const std::vector<StatisticId>& stats) {
    Estimates out;
    for (const auto& s : stats) {
        for (const auto& v : s.variables())
            if (!sample.has(v)) throw DataError("sample has no column '" + v + "'");
        for (const auto& v : s.variables())
            if (!sample.col(v).allFinite()) throw DataError("NA or non-finite value in '" + v + "'");
        switch (s.kind()) {
            case StatKind::Mean: out[s] = sample_mean(sample.col(s.first())); break;
            case StatKind::Sd: out[s] = sample_sd(sample.col(s.first())); break;
            case StatKind::Corr: out[s] = pearson(sample.col(s.first()), sample.col(s.second())); break;
        }
    }
    return out;
}

Estimates summarize(const std::vector<NodeId>& names, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                    const std::vector<StatisticId>& stats) {
    auto idx = [&](const NodeId& v) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == v) return static_cast<Eigen::Index>(i);
        throw DataError("no moments for '" + v + "'");
    };
    Estimates out;
    for (const auto& s : stats) {
        const auto i = idx(s.first());
        switch (s.kind()) {
            case StatKind::Mean: out[s] = mean[i]; break;
            case StatKind::Sd: out[s] = std::sqrt(cov(i, i)); break;
            case StatKind::Corr: {
                const auto j = idx(s.second());
                out[s] = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
                break;
            }
        }
    }
    return out;
}

double pool(std::span<const double> per_imputation) {
    if (per_imputation.empty()) throw DataError("cannot pool an empty list of estimates");
    return std::accumulate(per_imputation.begin(), per_imputation.end(), 0.0) /
           static_cast<double>(per_imputation.size());
}

Estimates pool(std::span<const Estimates> per_imputation) {
    if (per_imputation.empty()) throw DataError("cannot pool an empty list of estimates");
    Estimates out;
    for (const auto& [stat, _] : per_imputation.front()) {
        std::vector<double> values;
        for (const auto& e : per_imputation) {
            const auto it = e.find(stat);
            if (it == e.end() || e.size() != per_imputation.front().size())
                throw DataError("imputations report different statistics");
            values.push_back(it->second);
        }
        out[stat] = pool(values);
    }
    return out;
}

EstimateTable bias_table(const std::vector<StatisticId>& order, const Estimates& truth,
                         const std::vector<MethodEstimates>& methods) {
    if (methods.empty()) throw SpecError("bias table needs at least one method");
    if (truth.size() != order.size()) throw SpecError("truth does not cover exactly the requested statistics");

    EstimateTable t;
    t.statistics = order;
    t.estimates.resize(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(methods.size()));
    for (const auto& s : order) {
        const auto it = truth.find(s);
        if (it == truth.end()) throw SpecError("no truth for " + s.label());
        t.truth.push_back(it->second);
    }
    for (std::size_t j = 0; j < methods.size(); ++j) {
        const auto& m = methods[j];
        if (m.estimates.empty()) throw SpecError("method '" + m.method + "' has no estimates");
        if (m.estimates.size() != order.size())
            throw SpecError("method '" + m.method + "' reports a different statistic set");
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto it = m.estimates.find(order[i]);
            if (it == m.estimates.end())
                throw SpecError("method '" + m.method + "' has no estimate for " + order[i].label());
            t.estimates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
        }
        t.methods.push_back(m.method);
    }
    return t;
}

std::string EstimateTable::to_csv() const {
    std::ostringstream out;
    out << "statistic,method,truth,estimate,bias\n";
    for (std::size_t i = 0; i < statistics.size(); ++i)
        for (std::size_t j = 0; j < methods.size(); ++j)
            out << '"' << statistics[i].label() << "\"," << methods[j] << ',' << format_double(truth[i]) << ','
                << format_double(estimates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << ','
                << format_double(bias(i, j)) << '\n';
    return out.str();
}

namespace {
std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
}  // namespace

std::string EstimateTable::to_markdown() const {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"Statistic", "Truth"};
    for (const auto& m : methods) header.push_back(m);
    cells.push_back(header);
    for (std::size_t i = 0; i < statistics.size(); ++i) {
        std::vector<std::string> row{statistics[i].label(), two_decimals(truth[i])};
        for (std::size_t j = 0; j < methods.size(); ++j) row.push_back(two_decimals(bias(i, j)));
        cells.push_back(row);
    }
    std::vector<std::size_t> width(header.size(), 3);
    for (const auto& row : cells)
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        out << '|';
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto pad = width[j] - row[j].size();
            if (j == 0)
                out << ' ' << row[j] << std::string(pad, ' ') << " |";
            else
                out << ' ' << std::string(pad, ' ') << row[j] << " |";
        }
        out << '\n';
    };
    emit(cells[0]);
    out << '|';
    for (std::size_t j = 0; j < width.size(); ++j)
        out << (j == 0 ? ":" : "") << std::string(width[j] + 1, '-') << (j == 0 ? "|" : ":|");
    out << '\n';
    for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
    return out.str();
}

}  // namespace mdi
