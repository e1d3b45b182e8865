#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dgbn/errors.hpp"

namespace dgbn {

// One categorical variable. `labels`, when nonempty, holds the original
// string token for each state (size == cardinality); CSV ingestion fills it,
// synthetic domains usually leave it empty.
struct Variable {
    std::string name;
    int cardinality = 0;
    std::vector<std::string> labels;
};

inline bool operator==(const Variable& a, const Variable& b) {
    return a.name == b.name && a.cardinality == b.cardinality && a.labels == b.labels;
}

// Ordered set of categorical variables; the variable index is its position.
class Domain {
public:
    Domain() = default;

    explicit Domain(std::vector<Variable> vars) : vars_(std::move(vars)) {
        std::unordered_set<std::string> seen;
        for (const auto& v : vars_) {
            if (v.cardinality < 2)
                throw data_error("domain: variable '" + v.name + "' has cardinality " +
                                 std::to_string(v.cardinality) + " (must be >= 2)");
            if (!v.labels.empty() && static_cast<int>(v.labels.size()) != v.cardinality)
                throw data_error("domain: variable '" + v.name + "' label count does not match cardinality");
            if (!seen.insert(v.name).second)
                throw data_error("domain: duplicate variable name '" + v.name + "'");
        }
    }

    int size() const { return static_cast<int>(vars_.size()); }
    int cardinality(int i) const { return vars_[static_cast<std::size_t>(i)].cardinality; }
    const std::string& name(int i) const { return vars_[static_cast<std::size_t>(i)].name; }
    const Variable& variable(int i) const { return vars_[static_cast<std::size_t>(i)]; }
    const std::vector<Variable>& variables() const { return vars_; }

    // -1 when absent.
    int index_of(const std::string& name) const {
        for (int i = 0; i < size(); ++i)
            if (vars_[static_cast<std::size_t>(i)].name == name) return i;
        return -1;
    }

    friend bool operator==(const Domain& a, const Domain& b) { return a.vars_ == b.vars_; }

private:
    std::vector<Variable> vars_;
};

// Complete categorical data: one code per variable per case, stored row-major.
class Dataset {
public:
    Dataset() = default;

    Dataset(Domain domain, std::vector<std::int32_t> flat_cases)
        : domain_(std::move(domain)), cells_(std::move(flat_cases)) {
        const int n = domain_.size();
        if (n == 0) {
            if (!cells_.empty()) throw data_error("dataset: cases given for empty domain");
            return;
        }
        if (cells_.size() % static_cast<std::size_t>(n) != 0)
            throw data_error("dataset: flat case buffer is not a multiple of the variable count");
        num_cases_ = cells_.size() / static_cast<std::size_t>(n);
        for (std::size_t c = 0; c < num_cases_; ++c)
            for (int i = 0; i < n; ++i) {
                std::int32_t v = cells_[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
                if (v < 0 || v >= domain_.cardinality(i))
                    throw data_error("dataset: case " + std::to_string(c) + ", variable '" + domain_.name(i) +
                                     "': code " + std::to_string(v) + " out of range [0, " +
                                     std::to_string(domain_.cardinality(i)) + ")");
            }
    }

    static Dataset from_rows(Domain domain, const std::vector<std::vector<std::int32_t>>& rows) {
        std::vector<std::int32_t> flat;
        flat.reserve(rows.size() * static_cast<std::size_t>(domain.size()));
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != domain.size())
                throw data_error("dataset: row width " + std::to_string(r.size()) + " does not match domain size " +
                                 std::to_string(domain.size()));
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return Dataset(std::move(domain), std::move(flat));
    }

    const Domain& domain() const { return domain_; }
    std::size_t num_cases() const { return num_cases_; }

    std::int32_t value(std::size_t case_index, int var) const {
        return cells_[case_index * static_cast<std::size_t>(domain_.size()) + static_cast<std::size_t>(var)];
    }

    const std::vector<std::int32_t>& flat() const { return cells_; }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.domain_ == b.domain_ && a.cells_ == b.cells_;
    }

private:
    Domain domain_;
    std::vector<std::int32_t> cells_;
    std::size_t num_cases_ = 0;
};

}  // namespace dgbn
