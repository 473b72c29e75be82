#include "uspdisc/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "uspdisc/errors.hpp"

namespace uspdisc {

int eval_discrepancy(const IncidenceMatrix& a, const Coloring& x) {
  if (x.values.size() != a.cols()) {
    throw DimensionMismatch("coloring has " + std::to_string(x.values.size()) + " entries, matrix " +
                            std::to_string(a.cols()) + " columns");
  }
  int worst = 0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    int s = 0;
    for (std::size_t c : a.row_support(r)) s += x.values[c];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

namespace {

void guard(std::size_t cols, std::size_t max_cols, std::size_t default_guard, const char* what) {
  if (cols > max_cols) {
    throw TooLarge(std::string(what) + ": " + std::to_string(cols) + " columns exceed the guard of " +
                   std::to_string(max_cols));
  }
  if (max_cols > default_guard && cols > default_guard) {
    std::cerr << "warning: " << what << " on " << cols << " columns; guard raised past "
              << default_guard << ", expect a long run\n";
  }
}

// Column-major view restricted to an ordered column list.
struct Columns {
  std::size_t rows = 0;
  std::vector<std::vector<std::size_t>> rows_of;  // per selected column
  std::vector<int> row_count;                     // per row, within the selection

  Columns(const IncidenceMatrix& a, std::span<const std::size_t> cols) : rows(a.rows()) {
    rows_of.resize(cols.size());
    row_count.assign(a.rows(), 0);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      for (std::size_t r = 0; r < a.rows(); ++r) {
        if (a.get(r, cols[k])) {
          rows_of[k].push_back(r);
          ++row_count[r];
        }
      }
    }
  }

  int parity_bound() const {
    for (int c : row_count) {
      if (c % 2) return 1;
    }
    return 0;
  }
  int trivial_bound() const {
    int m = 0;
    for (int c : row_count) m = std::max(m, c);
    return m;
  }
};

// Depth-first search for a coloring with every |row sum| <= target.
// Columns are tried +1 first, and column 0 is fixed to +1, so the first hit
// is the lexicographically smallest such vector.
class Search {
 public:
  Search(const Columns& cols, int target)
      : cols_(cols), target_(target), sum_(cols.rows, 0), left_(cols.row_count), sign_(cols.rows_of.size(), 0) {}

  bool run() { return sign_.empty() || place(0); }
  const std::vector<std::int8_t>& signs() const { return sign_; }

 private:
  bool place(std::size_t k) {
    if (k == sign_.size()) return true;
    for (int s : {1, -1}) {
      if (k == 0 && s == -1) break;
      bool ok = true;
      std::size_t touched = 0;
      for (std::size_t r : cols_.rows_of[k]) {
        sum_[r] += s;
        --left_[r];
        ++touched;
        if (std::abs(sum_[r]) - left_[r] > target_) {
          ok = false;
          break;
        }
      }
      if (ok) {
        sign_[k] = static_cast<std::int8_t>(s);
        if (place(k + 1)) return true;
      }
      for (std::size_t t = 0; t < touched; ++t) {
        std::size_t r = cols_.rows_of[k][t];
        sum_[r] -= s;
        ++left_[r];
      }
    }
    return false;
  }

  const Columns& cols_;
  int target_;
  std::vector<int> sum_;
  std::vector<int> left_;
  std::vector<std::int8_t> sign_;
};

std::vector<std::size_t> iota_cols(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = k;
  return v;
}

DiscrepancyResult minimize(const Columns& cols, int from) {
  for (int t = std::max(from, cols.parity_bound());; ++t) {
    Search search(cols, t);
    if (search.run()) return {t, Coloring{Target::vertices, search.signs()}};
  }
}

}  // namespace

DiscrepancyResult exact_discrepancy(const IncidenceMatrix& a, std::size_t max_cols) {
  guard(a.cols(), max_cols, kDiscColumnGuard, "exact_discrepancy");
  auto all = iota_cols(a.cols());
  return minimize(Columns(a, all), 0);
}

DiscrepancyResult exact_discrepancy_enumerate(const IncidenceMatrix& a, std::size_t max_cols) {
  guard(a.cols(), max_cols, kDiscColumnGuard, "exact_discrepancy_enumerate");
  const std::size_t n = a.cols();
  DiscrepancyResult best;
  best.argmin.values.assign(n, 1);
  if (n == 0) {
    best.value = 0;
    return best;
  }
  auto all = iota_cols(n);
  Columns cols(a, all);
  std::vector<int> sum(a.rows(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r : cols.rows_of[k]) ++sum[r];
  }
  std::vector<std::int8_t> x(n, 1);
  auto value = [&] {
    int m = 0;
    for (int s : sum) m = std::max(m, std::abs(s));
    return m;
  };
  best.value = value();
  const int floor = cols.parity_bound();
  // Counter r over columns 1..n-1, column n-1 least significant: counting
  // up visits sign vectors in lexicographic order.
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t r = 1; r < total && best.value > floor; ++r) {
    std::uint64_t flipped = r ^ (r - 1);
    for (std::size_t p = 0; flipped >> p; ++p) {
      if (!((flipped >> p) & 1)) continue;
      std::size_t k = n - 1 - p;
      x[k] = static_cast<std::int8_t>(-x[k]);
      for (std::size_t row : cols.rows_of[k]) sum[row] += 2 * x[k];
    }
    int v = value();
    if (v < best.value) {
      best.value = v;
      best.argmin.values = x;
    }
  }
  return best;
}

HerdiscResult exact_hereditary_discrepancy(const IncidenceMatrix& a, std::size_t max_cols) {
  guard(a.cols(), max_cols, kHerdiscColumnGuard, "exact_hereditary_discrepancy");
  const std::size_t n = a.cols();
  HerdiscResult best;
  std::vector<std::size_t> subset;
  for (std::size_t size = 1; size <= n; ++size) {
    subset = iota_cols(size);
    for (;;) {
      Columns cols(a, subset);
      if (cols.trivial_bound() > best.value) {
        bool exceeds = cols.parity_bound() > best.value || !Search(cols, best.value).run();
        if (exceeds) {
          best.value = minimize(cols, best.value + 1).value;
          best.witness_cols = subset;
        }
      }
      // Next combination in lexicographic order.
      std::size_t k = size;
      while (k > 0 && subset[k - 1] == n - size + k - 1) --k;
      if (k == 0) break;
      ++subset[k - 1];
      for (std::size_t t = k; t < size; ++t) subset[t] = subset[t - 1] + 1;
    }
  }
  return best;
}

TraceStats trace_stats(const IncidenceMatrix& a) {
  TraceStats t;
  t.m = a.rows();
  t.n_cols = a.cols();
  std::vector<std::vector<std::size_t>> rows_of(a.cols());
  std::vector<std::vector<std::size_t>> support(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    support[r] = a.row_support(r);
    t.tr_M += support[r].size();
    for (std::size_t c : support[r]) rows_of[c].push_back(r);
  }
  // Row u of the Gram matrix: (A^T A)_{uv} = #rows containing u and v.
  std::vector<std::uint64_t> gram(a.cols(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t u = 0; u < a.cols(); ++u) {
    touched.clear();
    for (std::size_t r : rows_of[u]) {
      for (std::size_t v : support[r]) {
        if (gram[v]++ == 0) touched.push_back(v);
      }
    }
    for (std::size_t v : touched) {
      t.tr_M2 += gram[v] * gram[v];
      gram[v] = 0;
    }
  }
  return t;
}

std::uint64_t count_rectangles(const IncidenceMatrix& a) {
  // Row r against every row: intersection sizes by AND + popcount.
  std::uint64_t total = 0;
  const std::size_t w = a.words_per_row();
  for (std::size_t r1 = 0; r1 < a.rows(); ++r1) {
    auto x = a.row_words(r1);
    for (std::size_t r2 = 0; r2 < a.rows(); ++r2) {
      auto y = a.row_words(r2);
      std::uint64_t common = 0;
      for (std::size_t k = 0; k < w; ++k) common += static_cast<std::uint64_t>(__builtin_popcountll(x[k] & y[k]));
      total += common * common;
    }
  }
  return total;
}

double larsen_bound(const TraceStats& t) {
  if (t.tr_M == 0) throw DegenerateMatrix("larsen_bound needs a nonzero matrix");
  const double tr = static_cast<double>(t.tr_M);
  const double tr2 = static_cast<double>(t.tr_M2);
  const double lo = static_cast<double>(std::min(t.m, t.n_cols));
  const double hi = static_cast<double>(std::max(t.m, t.n_cols));
  return tr * tr / (8.0 * std::numbers::e * lo * tr2) * std::sqrt(tr / hi);
}

double larsen_bound(const IncidenceMatrix& a) { return larsen_bound(trace_stats(a)); }

double chazelle_lvov_bound(const TraceStats& t, double c) {
  if (!(c > 0 && c < 1)) throw std::invalid_argument("c must lie in (0, 1)");
  if (t.tr_M == 0) throw DegenerateMatrix("chazelle_lvov_bound needs a nonzero matrix");
  const double tr = static_cast<double>(t.tr_M);
  const double n = static_cast<double>(t.n_cols);
  const double exponent = n * static_cast<double>(t.tr_M2) / (tr * tr);
  return 0.25 * std::pow(c, exponent) * std::sqrt(tr / n);
}

double chazelle_lvov_bound(const IncidenceMatrix& a, double c) { return chazelle_lvov_bound(trace_stats(a), c); }

}  // namespace uspdisc
