#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"

namespace dgbn {

enum class HeaderPolicy { none, first_row };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(field);
    return out;
}

}  // namespace detail

// Comma-separated categorical data. Every distinct token of a column becomes
// a state; codes follow the lexicographic order of the tokens, so the
// encoding does not depend on row order. Empty cells and ragged rows are
// rejected, as are constant columns (a categorical variable needs two
// states).
inline Dataset parse_csv(std::istream& in, HeaderPolicy policy) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    std::vector<std::string> names;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && rows.empty() && names.empty()) continue;  // leading blank lines
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line);
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw data_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(width));
        if (policy == HeaderPolicy::first_row && names.empty()) {
            names = std::move(fields);
            continue;
        }
        for (std::size_t col = 0; col < fields.size(); ++col)
            if (fields[col].empty())
                throw data_error("csv: empty value at line " + std::to_string(line_no) + ", column " +
                                 std::to_string(col + 1));
        rows.push_back(std::move(fields));
    }
    if (width == 0) throw data_error("csv: no data");
    if (rows.empty()) throw data_error("csv: header only, no data rows");
    if (names.empty())
        for (std::size_t col = 0; col < width; ++col) names.push_back("v" + std::to_string(col));

    std::vector<Variable> vars(width);
    std::vector<std::vector<std::string>> labels(width);
    for (std::size_t col = 0; col < width; ++col) {
        std::set<std::string> tokens;
        for (const auto& row : rows) tokens.insert(row[col]);
        if (tokens.size() < 2)
            throw data_error("csv: column '" + names[col] + "' has a single value; not a categorical variable");
        labels[col].assign(tokens.begin(), tokens.end());
        vars[col] = Variable{names[col], static_cast<int>(labels[col].size()), labels[col]};
    }

    std::vector<std::int32_t> flat;
    flat.reserve(rows.size() * width);
    for (const auto& row : rows)
        for (std::size_t col = 0; col < width; ++col) {
            auto it = std::lower_bound(labels[col].begin(), labels[col].end(), row[col]);
            flat.push_back(static_cast<std::int32_t>(it - labels[col].begin()));
        }
    return Dataset(Domain(std::move(vars)), std::move(flat));
}

inline Dataset load_csv(const std::string& path, HeaderPolicy policy) {
    std::ifstream in(path);
    if (!in) throw data_error("csv: cannot open '" + path + "'");
    return parse_csv(in, policy);
}

// Writes tokens from the domain labels when present; otherwise decimal codes,
// zero-padded when a column has more than ten states so that reloading (which
// sorts tokens lexicographically) reproduces the same coding.
inline void write_csv(const Dataset& data, std::ostream& out, bool header) {
    const Domain& domain = data.domain();
    std::vector<int> pad(static_cast<std::size_t>(domain.size()), 0);
    for (int i = 0; i < domain.size(); ++i)
        if (domain.variable(i).labels.empty())
            pad[static_cast<std::size_t>(i)] =
                static_cast<int>(std::to_string(domain.cardinality(i) - 1).size());
    if (header) {
        for (int i = 0; i < domain.size(); ++i) {
            if (i) out << ',';
            out << domain.name(i);
        }
        out << '\n';
    }
    for (std::size_t c = 0; c < data.num_cases(); ++c) {
        for (int i = 0; i < domain.size(); ++i) {
            if (i) out << ',';
            const Variable& v = domain.variable(i);
            if (!v.labels.empty()) {
                out << v.labels[static_cast<std::size_t>(data.value(c, i))];
            } else {
                std::string tok = std::to_string(data.value(c, i));
                while (static_cast<int>(tok.size()) < pad[static_cast<std::size_t>(i)]) tok.insert(tok.begin(), '0');
                out << tok;
            }
        }
        out << '\n';
    }
}

inline void save_csv(const Dataset& data, const std::string& path, bool header) {
    std::ofstream out(path);
    if (!out) throw data_error("csv: cannot write '" + path + "'");
    write_csv(data, out, header);
}

}  // namespace dgbn
