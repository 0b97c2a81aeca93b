#pragma once

#include "mdimpute/graph.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdi {

/// Dense, fully observed columns with names. Column-major storage; each
/// column is one variable.
template <typename Scalar>
class BasicFrame {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    BasicFrame() = default;
    BasicFrame(std::vector<NodeId> names, Matrix values) : names_(std::move(names)), values_(std::move(values)) {
        if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
            throw std::invalid_argument("frame: name count does not match column count");
    }
    BasicFrame(std::vector<NodeId> names, Eigen::Index rows)
        : BasicFrame(names, Matrix::Zero(rows, static_cast<Eigen::Index>(names.size()))) {}

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }
    const std::vector<NodeId>& names() const { return names_; }
    const Matrix& values() const { return values_; }
    Matrix& values() { return values_; }

    bool has(const NodeId& name) const { return find(name) >= 0; }
    Eigen::Index column_index(const NodeId& name) const {
        const auto i = find(name);
        if (i < 0) throw std::out_of_range("frame: no column '" + name + "'");
        return i;
    }
    auto col(const NodeId& name) const { return values_.col(column_index(name)); }
    auto col(const NodeId& name) { return values_.col(column_index(name)); }

    friend bool operator==(const BasicFrame& a, const BasicFrame& b) {
        return a.names_ == b.names_ && a.values_.rows() == b.values_.rows() &&
               a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
    }

private:
    Eigen::Index find(const NodeId& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<Eigen::Index>(i);
        return -1;
    }

    std::vector<NodeId> names_;
    Matrix values_;
};

using Frame = BasicFrame<double>;

/// A proxy cell: the value when observed, nullopt for NA.
using Cell = std::optional<double>;
using IndicatorColumn = std::vector<std::uint8_t>;
/// Indicator columns keyed by indicator name (e.g. "R_X").
using IndicatorColumns = std::map<NodeId, IndicatorColumn>;

struct Provenance {
    std::uint64_t spec_hash = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Incomplete data as seen by estimators: proxies and response indicators.
/// Fully observed variables carry no NA; for partially observed ones the
/// proxy is NA exactly where the indicator is 0.
class Dataset {
public:
    explicit Dataset(std::size_t rows = 0) : rows_(rows) {}

    void add_observed(const NodeId& name, std::vector<double> values);
    void add_partial(const NodeId& name, const NodeId& indicator, std::vector<Cell> proxy,
                     IndicatorColumn indicator_values);

    std::size_t rows() const { return rows_; }
    /// Substantive variables in insertion order.
    const std::vector<NodeId>& variables() const { return variables_; }
    bool contains(const NodeId& name) const { return columns_.contains(name); }
    bool is_partial(const NodeId& name) const;
    const NodeId& indicator_name(const NodeId& variable) const;
    /// Indicator names in variable order.
    std::vector<NodeId> indicator_names() const;

    const std::vector<Cell>& proxy(const NodeId& variable) const;
    /// Indicator column of a partially observed variable.
    const IndicatorColumn& indicator(const NodeId& variable) const;
    /// 1 where the variable is observed; all ones for fully observed variables.
    bool observed(const NodeId& variable, std::size_t row) const;

    /// Fully observed rows as a frame (throws DataError if any requested cell is NA).
    Frame frame(std::span<const std::size_t> rows) const;
    Frame frame(std::span<const std::size_t> rows, const std::vector<NodeId>& columns) const;

    Provenance provenance;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    struct Column {
        std::vector<Cell> proxy;
        NodeId indicator;  // empty for fully observed
        IndicatorColumn indicator_values;
        friend bool operator==(const Column&, const Column&) = default;
    };
    const Column& column(const NodeId& name) const;
    void check_new(const NodeId& name, std::size_t length) const;

    std::size_t rows_ = 0;
    std::vector<NodeId> variables_;
    std::map<NodeId, Column> columns_;
};

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double v);

/// CSV with header. Partially observed variable X is written as column
/// `X_star` (empty field for NA) plus its indicator column (e.g. `R_X`);
/// fully observed variables keep their own name. Proxies first, then indicators.
void write_dataset_csv(std::ostream& out, const Dataset& d);
/// Reads a dataset CSV laid out for graph `g`; checks the NA/indicator invariant.
Dataset read_dataset_csv(std::istream& in, const MissingDataGraph& g);

/// Frame as CSV: header of column names, full-precision values.
void write_frame_csv(std::ostream& out, const Frame& f);
/// Frame followed by indicator columns (used for completed datasets).
void write_frame_csv(std::ostream& out, const Frame& f, const Dataset& indicators_from);

/// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace mdi
