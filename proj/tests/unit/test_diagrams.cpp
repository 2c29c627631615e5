#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "reldiff/diagrams.hpp"
#include "reldiff/error.hpp"

using namespace reldiff;

namespace {

// Regular count from the multiplicity formula; zero when a level size occurs an odd number of times.
BigInt formula(const Order& order) {
  std::map<int, int> mult;
  for (int l : order) ++mult[l];
  std::vector<int> r, q;
  for (auto [l, k] : mult) {
    if (k % 2) return 0;
    r.push_back(l);
    q.push_back(k / 2);
  }
  return regular_multiplicity(r, q);
}

}  // namespace

TEST_CASE("complete diagram counts") {
  CHECK(count_complete({2, 2}) == 2);
  CHECK(count_complete({3, 3}) == 6);
  CHECK(count_complete({1, 1, 1, 1}) == 3);
  CHECK(count_complete({2, 2, 2}) == 8);
  CHECK(count_complete({2, 2, 2, 2}) == 60);
  CHECK(count_complete({1, 1, 2, 2}) == 10);
  CHECK(enumerate_complete({2, 2, 2}).size() == 8);
}

TEST_CASE("order validation") {
  CHECK_THROWS_AS(count_complete({3}), ValidationError);
  CHECK_THROWS_AS(count_complete({1, 2}), ValidationError);
  CHECK_THROWS_AS(count_complete({0, 2}), ValidationError);
  CHECK_THROWS_AS(count_complete({6, 6, 6, 4}), ValidationError);
}

TEST_CASE("regular diagrams") {
  for (const auto& d : enumerate_complete({3, 3})) CHECK(is_regular(d).has_value());
  CHECK(count_regular({2, 2, 2}) == 0);
  CHECK(count_regular({1, 1, 1, 1}) == 3);
  for (const Order& o : std::vector<Order>{{1, 1, 2, 2}, {2, 2, 2, 2}, {1, 1, 3, 3}, {2, 2, 3, 3}, {1, 2, 1, 2}}) {
    CHECK(BigInt(count_regular(o)) == formula(o));
  }
  const auto dec = is_regular(enumerate_complete({1, 1, 1, 1})[0]);
  REQUIRE(dec.has_value());
  CHECK(dec->pairs.size() == 2);
  CHECK(dec->edge_counts == std::vector<int>{1, 1});
}

TEST_CASE("non-regular inequality") {
  const auto a = nonregular_inequality_check({2, 2, 2});
  CHECK(a.ok);
  CHECK(a.nonregular == 8);
  CHECK(*a.min_margin == 0);
  const auto b = nonregular_inequality_check({1, 1, 1, 1});
  CHECK(b.ok);
  CHECK(b.nonregular == 0);
  CHECK(!b.min_margin.has_value());
  const auto c = nonregular_inequality_check({2, 2, 2, 2});
  CHECK(c.ok);
  CHECK(c.nonregular == 48);
  const auto d = nonregular_inequality_check({2, 2, 1, 1});
  CHECK(d.ok);
  CHECK(*d.min_margin == Rational(1, 2));
  const auto e = nonregular_inequality_check({3, 3, 3, 3});
  CHECK(e.ok);
  CHECK(e.complete == 3348);
  CHECK(e.nonregular == 3240);
}

TEST_CASE("regular sum identity") {
  const auto one = regular_sum({Rational(2), Rational(5)}, 1, 1);
  CHECK(one.enumeration == 7);
  CHECK(one.residual == 0);
  const auto ones = regular_sum({Rational(1), Rational(1)}, 1, 2);
  CHECK(ones.enumeration == 12);
  CHECK(ones.closed_form == 12);
  const auto ab = regular_sum({Rational(2), Rational(5)}, 1, 2);
  CHECK(ab.enumeration == 147);
  CHECK(ab.residual == 0);
  CHECK(regular_sum_bruteforce({Rational(2), Rational(5)}, 1, 2).enumeration == 147);
  CHECK(regular_sum_bruteforce({Rational(1, 3), Rational(7, 2)}, 2, 2).residual == 0);
  CHECK_THROWS_AS(regular_sum({Rational(1)}, 1, 5), ValidationError);
  CHECK_THROWS_AS(regular_sum({Rational(-1)}, 1, 2), ValidationError);
  CHECK_THROWS_AS(regular_sum_bruteforce({Rational(1), Rational(1), Rational(1), Rational(1)}, 1, 3), ValidationError);
}

TEST_CASE("regular sum with random rational weights") {
  std::mt19937 gen(5);
  std::uniform_int_distribution<int> num(0, 40), den(1, 9), len(1, 4), nu(1, 3), m(1, 3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rational> w;
    const int L = len(gen);
    for (int i = 0; i < L; ++i) w.push_back(Rational(num(gen), den(gen)));
    const auto r = regular_sum(w, m(gen), nu(gen));
    CHECK(r.residual == 0);
  }
}

TEST_CASE("helpers") {
  CHECK(double_factorial(5) == 15);
  CHECK(double_factorial(0) == 1);
  CHECK(regular_multiplicity({2}, {1}) == 2);
  CHECK(regular_multiplicity({1}, {2}) == 3);
  CHECK(to_string(Order{2, 2, 2}) == "(2,2,2)");
  CHECK(lower_edge_counts(enumerate_complete({1, 1})[0]) == std::vector<int>{1, 0});
}
