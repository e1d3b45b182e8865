#pragma once

#include <cstdint>
#include <vector>

#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"

namespace dgbn {

// Mixed-radix index over the joint states of an ordered parent list. The
// least-significant digit is the first parent in the list, so with parents
// (p0, p1): j = value(p0) + value(p1) * r_{p0}.
class ParentSpace {
public:
    ParentSpace(const Domain& domain, std::vector<int> parents) : parents_(std::move(parents)) {
        radices_.reserve(parents_.size());
        size_ = 1;
        for (int p : parents_) {
            int r = domain.cardinality(p);
            radices_.push_back(r);
            if (size_ > UINT64_MAX / static_cast<std::uint64_t>(r)) {
                overflow_ = true;
                size_ = 0;
            }
            if (!overflow_) size_ *= static_cast<std::uint64_t>(r);
        }
    }

    const std::vector<int>& parents() const { return parents_; }
    std::size_t arity() const { return parents_.size(); }

    // True when the joint state count does not fit in 64 bits; size() is then
    // meaningless and enumeration is unavailable.
    bool overflow() const { return overflow_; }
    std::uint64_t size() const { return size_; }

    std::uint64_t encode(const std::vector<int>& values) const {
        std::uint64_t j = 0;
        std::uint64_t weight = 1;
        for (std::size_t t = 0; t < parents_.size(); ++t) {
            j += weight * static_cast<std::uint64_t>(values[t]);
            weight *= static_cast<std::uint64_t>(radices_[t]);
        }
        return j;
    }

    std::vector<int> decode(std::uint64_t j) const {
        std::vector<int> values(parents_.size());
        for (std::size_t t = 0; t < parents_.size(); ++t) {
            values[t] = static_cast<int>(j % static_cast<std::uint64_t>(radices_[t]));
            j /= static_cast<std::uint64_t>(radices_[t]);
        }
        return values;
    }

    // Parent-state index of one dataset row.
    std::uint64_t encode_case(const Dataset& data, std::size_t case_index) const {
        std::uint64_t j = 0;
        std::uint64_t weight = 1;
        for (std::size_t t = 0; t < parents_.size(); ++t) {
            j += weight * static_cast<std::uint64_t>(data.value(case_index, parents_[t]));
            weight *= static_cast<std::uint64_t>(radices_[t]);
        }
        return j;
    }

private:
    std::vector<int> parents_;
    std::vector<int> radices_;
    std::uint64_t size_ = 1;
    bool overflow_ = false;
};

}  // namespace dgbn
