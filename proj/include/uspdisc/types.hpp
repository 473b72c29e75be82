#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace uspdisc {

using NodeId = std::int32_t;

// Exact weights and coordinates.
using Rational = mpq_class;

// Undirected edge keys are stored with first <= second.
using NodePair = std::pair<NodeId, NodeId>;
using EdgeList = std::vector<NodePair>;

// Accepts "7", "-3/4" and plain decimals such as "0.125" or "1e-3".
Rational parse_rational(std::string_view text);
Rational rational_from_double(double value);

// "num/den" in base 10, or just "num" when the denominator is one.
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace uspdisc
