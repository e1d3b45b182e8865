#pragma once

#include <algorithm>
#include <vector>

namespace dgbn {

// Sets of variable states are kept as sorted vectors of codes; they are tiny
// (one entry per state of one variable).
using ValueSet = std::vector<int>;

inline ValueSet make_value_set(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

inline ValueSet full_value_set(int cardinality) {
    ValueSet s(static_cast<std::size_t>(cardinality));
    for (int i = 0; i < cardinality; ++i) s[static_cast<std::size_t>(i)] = i;
    return s;
}

inline bool set_contains(const ValueSet& s, int v) {
    return std::binary_search(s.begin(), s.end(), v);
}

inline ValueSet set_intersect(const ValueSet& a, const ValueSet& b) {
    ValueSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline ValueSet set_union(const ValueSet& a, const ValueSet& b) {
    ValueSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline ValueSet set_minus(const ValueSet& a, const ValueSet& b) {
    ValueSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace dgbn
