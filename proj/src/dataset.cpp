#include "mdimpute/dataset.hpp"

#include "mdimpute/error.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mdi {

void Dataset::check_new(const NodeId& name, std::size_t length) const {
    if (columns_.contains(name)) throw DataError("duplicate column '" + name + "'");
    if (length != rows_)
        throw DataError("column '" + name + "' has " + std::to_string(length) + " rows, expected " +
                        std::to_string(rows_));
}

void Dataset::add_observed(const NodeId& name, std::vector<double> values) {
    check_new(name, values.size());
    Column c;
    c.proxy.assign(values.begin(), values.end());
    variables_.push_back(name);
    columns_.emplace(name, std::move(c));
}

void Dataset::add_partial(const NodeId& name, const NodeId& indicator, std::vector<Cell> proxy,
                          IndicatorColumn indicator_values) {
    check_new(name, proxy.size());
    if (indicator_values.size() != rows_)
        throw DataError("indicator '" + indicator + "' length mismatch");
    if (indicator.empty()) throw DataError("partially observed '" + name + "' needs an indicator name");
    for (std::size_t i = 0; i < rows_; ++i) {
        const auto r = indicator_values[i];
        if (r > 1) throw DataError("indicator '" + indicator + "' has a value other than 0/1");
        if ((r == 1) != proxy[i].has_value())
            throw DataError("proxy '" + name + "' row " + std::to_string(i) +
                            " disagrees with its indicator");
    }
    variables_.push_back(name);
    columns_.emplace(name, Column{std::move(proxy), indicator, std::move(indicator_values)});
}

const Dataset::Column& Dataset::column(const NodeId& name) const {
    const auto it = columns_.find(name);
    if (it == columns_.end()) throw DataError("dataset has no variable '" + name + "'");
    return it->second;
}

bool Dataset::is_partial(const NodeId& name) const { return !column(name).indicator.empty(); }

const NodeId& Dataset::indicator_name(const NodeId& variable) const {
    const auto& c = column(variable);
    if (c.indicator.empty()) throw DataError("'" + variable + "' is fully observed");
    return c.indicator;
}

std::vector<NodeId> Dataset::indicator_names() const {
    std::vector<NodeId> out;
    for (const auto& v : variables_)
        if (is_partial(v)) out.push_back(indicator_name(v));
    return out;
}

const std::vector<Cell>& Dataset::proxy(const NodeId& variable) const { return column(variable).proxy; }

const IndicatorColumn& Dataset::indicator(const NodeId& variable) const {
    const auto& c = column(variable);
    if (c.indicator.empty()) throw DataError("'" + variable + "' is fully observed");
    return c.indicator_values;
}

bool Dataset::observed(const NodeId& variable, std::size_t row) const {
    return column(variable).proxy[row].has_value();
}

Frame Dataset::frame(std::span<const std::size_t> rows) const { return frame(rows, variables_); }

Frame Dataset::frame(std::span<const std::size_t> rows, const std::vector<NodeId>& columns) const {
    Frame f(columns, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& proxy = column(columns[j]).proxy;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& cell = proxy[rows[i]];
            if (!cell) throw DataError("NA in '" + columns[j] + "' row " + std::to_string(rows[i]));
            f.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *cell;
        }
    }
    return f;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("cannot parse number '" + s + "' in " + where);
    return v;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& d) {
    std::string header;
    for (const auto& v : d.variables()) header += (header.empty() ? "" : ",") + (d.is_partial(v) ? v + "_star" : v);
    for (const auto& r : d.indicator_names()) header += "," + r;
    out << header << '\n';

    const auto indicators = d.indicator_names();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        std::string line;
        bool first = true;
        for (const auto& v : d.variables()) {
            if (!first) line += ',';
            first = false;
            if (const auto& cell = d.proxy(v)[i]) line += format_double(*cell);
        }
        for (const auto& v : d.variables())
            if (d.is_partial(v)) line += d.indicator(v)[i] ? ",1" : ",0";
        out << line << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in, const MissingDataGraph& g) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset file");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (!col.emplace(header[j], j).second) throw DataError("duplicate CSV column '" + header[j] + "'");

    auto need = [&](const std::string& name) {
        const auto it = col.find(name);
        if (it == col.end()) throw DataError("dataset is missing column '" + name + "'");
        return it->second;
    };
    struct Spec {
        NodeId var;
        std::size_t value_col;
        std::optional<std::size_t> indicator_col;
    };
    std::vector<Spec> specs;
    for (const auto& v : g.substantive()) {
        if (g.is_partial(v))
            specs.push_back({v, need(v + "_star"), need(g.indicator_of(v))});
        else
            specs.push_back({v, need(v), std::nullopt});
    }

    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields");
        rows.push_back(std::move(fields));
    }

    Dataset d(rows.size());
    for (const auto& s : specs) {
        if (!s.indicator_col) {
            std::vector<double> values(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& f = rows[i][s.value_col];
                if (f.empty()) throw DataError("fully observed '" + s.var + "' has NA in row " + std::to_string(i));
                values[i] = parse_double(f, s.var);
            }
            d.add_observed(s.var, std::move(values));
        } else {
            std::vector<Cell> proxy(rows.size());
            IndicatorColumn r(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& f = rows[i][s.value_col];
                if (!f.empty()) proxy[i] = parse_double(f, s.var + "_star");
                const auto& rf = rows[i][*s.indicator_col];
                if (rf == "1")
                    r[i] = 1;
                else if (rf == "0")
                    r[i] = 0;
                else
                    throw DataError("indicator '" + g.indicator_of(s.var) + "' value '" + rf + "' is not 0/1");
            }
            d.add_partial(s.var, g.indicator_of(s.var), std::move(proxy), std::move(r));
        }
    }
    return d;
}

void write_frame_csv(std::ostream& out, const Frame& f) {
    for (std::size_t j = 0; j < f.names().size(); ++j) out << (j ? "," : "") << f.names()[j];
    out << '\n';
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) out << (j ? "," : "") << format_double(f.values()(i, j));
        out << '\n';
    }
}

void write_frame_csv(std::ostream& out, const Frame& f, const Dataset& indicators_from) {
    if (static_cast<std::size_t>(f.rows()) != indicators_from.rows())
        throw DataError("frame and dataset row counts differ");
    std::vector<NodeId> partial;
    for (const auto& v : indicators_from.variables())
        if (indicators_from.is_partial(v)) partial.push_back(v);

    for (std::size_t j = 0; j < f.names().size(); ++j) out << (j ? "," : "") << f.names()[j];
    for (const auto& v : partial) out << ',' << indicators_from.indicator_name(v);
    out << '\n';
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) out << (j ? "," : "") << format_double(f.values()(i, j));
        for (const auto& v : partial) out << (indicators_from.indicator(v)[static_cast<std::size_t>(i)] ? ",1" : ",0");
        out << '\n';
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp + "'");
        out << content;
        if (!out) throw DataError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace mdi
