#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uspdisc/coloring.hpp"
#include "uspdisc/path_system.hpp"

namespace uspdisc {

inline constexpr std::size_t kDiscColumnGuard = 24;
inline constexpr std::size_t kHerdiscColumnGuard = 16;

int eval_discrepancy(const IncidenceMatrix& a, const Coloring& x);

struct DiscrepancyResult {
  int value = 0;
  Coloring argmin;  // lexicographically first minimizer, +1 before -1
};

// Exhaustive with the first sign fixed to +1 (x and -x are equivalent).
// Raising the guard past its default prints a warning.
DiscrepancyResult exact_discrepancy(const IncidenceMatrix& a, std::size_t max_cols = kDiscColumnGuard);

// Plain enumeration of all 2^(n-1) vectors; reference for the search above.
DiscrepancyResult exact_discrepancy_enumerate(const IncidenceMatrix& a,
                                              std::size_t max_cols = kDiscColumnGuard);

struct HerdiscResult {
  int value = 0;
  std::vector<std::size_t> witness_cols;  // first maximizer in size-then-lex order
};

HerdiscResult exact_hereditary_discrepancy(const IncidenceMatrix& a,
                                           std::size_t max_cols = kHerdiscColumnGuard);

struct TraceStats {
  std::uint64_t tr_M = 0;
  std::uint64_t tr_M2 = 0;
  std::size_t m = 0;
  std::size_t n_cols = 0;
};

// tr_M2 is summed over entries of the column Gram matrix A^T A.
TraceStats trace_stats(const IncidenceMatrix& a);

double larsen_bound(const IncidenceMatrix& a);
double larsen_bound(const TraceStats& t);
double chazelle_lvov_bound(const IncidenceMatrix& a, double c = 0.25);
double chazelle_lvov_bound(const TraceStats& t, double c = 0.25);

// Tuples (u, v, pi1, pi2) with u, v on both rows: sum over ordered row
// pairs of |pi1 cap pi2|^2, computed row by row.
std::uint64_t count_rectangles(const IncidenceMatrix& a);

}  // namespace uspdisc
