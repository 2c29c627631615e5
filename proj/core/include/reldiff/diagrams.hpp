#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace reldiff {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Level sizes (l_1, ..., l_p).
using Order = std::vector<int>;

/// Brute-force enumeration refuses orders with more vertices than this.
inline constexpr int kMaxDiagramVertices = 20;

/// Edge between vertex index1 of level1 and vertex index2 of level2, level1 < level2
/// (all zero-based).
struct Edge {
  int level1 = 0;
  int index1 = 0;
  int level2 = 0;
  int index2 = 0;
};

struct Diagram {
  Order order;
  std::vector<Edge> edges;
};

/// Level pairs (d1 < d2) of the sub-diagrams and their edge counts, sorted by d1.
struct RegularDecomposition {
  std::vector<std::array<int, 2>> pairs;
  std::vector<int> edge_counts;
};

/// Throws ValidationError for p < 2, a level of size < 1, an odd vertex total, or
/// more than kMaxDiagramVertices vertices.
void validate_order(const Order& order);

/// Visits every complete diagram of the order in lexicographic matching order
/// (the lowest unmatched vertex is paired first, partners in increasing order).
void for_each_complete(const Order& order, const std::function<void(const Diagram&)>& visit);

std::vector<Diagram> enumerate_complete(const Order& order);
std::uint64_t count_complete(const Order& order);

/// The decomposition when the level graph of d is a perfect matching of levels.
std::optional<RegularDecomposition> is_regular(const Diagram& d);
std::uint64_t count_regular(const Order& order);

/// #B(i): edges whose lower level is i.
std::vector<int> lower_edge_counts(const Diagram& d);

struct InequalityCheck {
  bool ok = true;
  std::uint64_t complete = 0;
  std::uint64_t nonregular = 0;
  /// min over non-regular diagrams of sum_i #B(i)/l_i - p/2 (absent when none).
  std::optional<Rational> min_margin;
  std::optional<Diagram> witness;
};

/// sum_i #B(i)/l_i >= p/2 for every complete non-regular diagram. Levels are taken in
/// non-decreasing size order, as the bound assumes.
InequalityCheck nonregular_inequality_check(const Order& order);

struct RegularSum {
  Rational enumeration;
  Rational closed_form;
  Rational residual;
  /// Regular diagrams visited (structural count summed over all L).
  BigInt diagrams = 0;
};

/// weights[r - m] = w_r for r = m..m + weights.size() - 1 (so N0 = m + size - 1).
/// Enumeration: sum over L in {m..N0}^{2 nu} and over regular diagrams of order L of
/// prod_i w_{#E_i} / #E_i!, built from level pairings times #E! bijections per pair.
/// Closed form: (2 nu - 1)!! (sum_r w_r)^nu. Caps: 1 <= nu <= 4, at most 8 weights.
RegularSum regular_sum(const std::vector<Rational>& weights, int m, int nu);

/// Same sum, but every complete diagram of every L is enumerated one by one and
/// tested with is_regular; each L must respect kMaxDiagramVertices.
RegularSum regular_sum_bruteforce(const std::vector<Rational>& weights, int m, int nu);

/// Regular diagrams of a fixed order holding 2 q_i levels of size r_i:
/// prod_i (2 q_i)! / (2^{q_i} q_i!) (r_i!)^{q_i}.
BigInt regular_multiplicity(const std::vector<int>& r, const std::vector<int>& q);

BigInt double_factorial(int k);

std::string to_string(const Order& order);

}  // namespace reldiff
