#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "erasenet/assignment.hpp"

using namespace erasenet;

namespace {

std::vector<int> carriers_of(const MessageAssignment& a) {
    std::vector<int> c;
    for (int i = 1; i <= a.users(); ++i) c.push_back(a.carrier(i));
    return c;
}

}  // namespace

TEST_CASE("strategy strings tile into assignments") {
    // All-ones: everyone transmits their own message.
    CHECK(carriers_of(assignment_from_string({1}, 4)) == std::vector<int>{1, 2, 3, 4});
    // (2,1,0) on three users: transmitter 1 carries W1 and W2, transmitter 2
    // carries W3, transmitter 3 is silent.
    CHECK(carriers_of(assignment_from_string({2, 1, 0}, 3)) == std::vector<int>{1, 1, 2});
    // Tail positions past the last whole tile fall back to load 1.
    CHECK(carriers_of(assignment_from_string({2, 1, 0}, 5)) ==
          std::vector<int>{1, 1, 2, 4, 5});
    CHECK(carriers_of(assignment_from_string({1, 2, 1, 0}, 4)) ==
          std::vector<int>{1, 2, 2, 3});

    CHECK_THROWS_AS(assignment_from_string({2, 1, 1}, 6), std::invalid_argument);  // sum != n
    CHECK_THROWS_AS(assignment_from_string({2, 1, 0}, 2), std::invalid_argument);  // K < n
    CHECK_THROWS_AS(assignment_from_string({}, 3), std::invalid_argument);
}

TEST_CASE("load vectors invert uniquely") {
    CHECK(carriers_of(assignment_from_load_vector({1, 1, 1})) == std::vector<int>{1, 2, 3});
    CHECK(carriers_of(assignment_from_load_vector({2, 1, 0})) == std::vector<int>{1, 1, 2});
    CHECK(carriers_of(assignment_from_load_vector({1, 2, 1, 0})) ==
          std::vector<int>{1, 2, 2, 3});
    // Segment ends at each zero; trailing all-ones segment is allowed.
    CHECK(carriers_of(assignment_from_load_vector({2, 0, 1, 1})) ==
          std::vector<int>{1, 1, 3, 4});

    for (const LoadVector& bad :
         {LoadVector{2, 2, 0}, LoadVector{1, 0}, LoadVector{0, 1}, LoadVector{2, 1},
          LoadVector{3, 0, 0}, LoadVector{1, 2, 0, 0}, LoadVector{}}) {
        CHECK_THROWS_WITH(assignment_from_load_vector(bad),
                          "not a valid irreducible load vector");
    }
}

TEST_CASE("load vector round trip covers every order-1 assignment up to K=12") {
    for (int k = 1; k <= 12; ++k) {
        std::set<LoadVector> distinct;
        for (uint64_t mask = 0; mask < irreducible_m1_count(k); ++mask) {
            const MessageAssignment a = irreducible_m1_assignment(k, mask);
            REQUIRE(a.irreducible_m1());
            const LoadVector loads = load_vector(a);
            distinct.insert(loads);
            REQUIRE(assignment_from_load_vector(loads) == a);
        }
        // The map assignment -> load vector is injective.
        CHECK(distinct.size() == irreducible_m1_count(k));
    }
}

TEST_CASE("string classification recognizes exactly the four templates") {
    CHECK(classify_string({1}).form == StringForm::s1);
    CHECK(classify_string({1}).n_ones == 1);
    CHECK(classify_string({1, 1, 1}).form == StringForm::s1);

    CHECK(classify_string({2, 1, 1, 1, 0}).form == StringForm::s2);
    CHECK(classify_string({2, 1, 1, 1, 0}).n_ones == 3);
    CHECK(classify_string({2, 1, 0}).form == StringForm::s2);
    CHECK(classify_string({2, 0}).form == StringForm::s2);
    CHECK(classify_string({2, 0}).n_ones == 0);

    CHECK(classify_string({1, 1, 2, 0}).form == StringForm::s3);
    CHECK(classify_string({1, 1, 2, 0}).n_ones == 2);
    CHECK(classify_string({1, 2, 0}).form == StringForm::s3);

    CHECK(classify_string({1, 2, 1, 0}).form == StringForm::s4);
    CHECK(classify_string({1, 2, 1, 0}).n_ones == 2);
    CHECK(classify_string({1, 1, 2, 1, 1, 0}).form == StringForm::s4);

    for (const std::vector<int>& bad :
         {std::vector<int>{0}, {2, 2, 0, 0}, {1, 2, 1}, {2, 1, 0, 1}, {0, 1, 2},
          {1, 3, 0}, {}}) {
        CHECK(classify_string(bad).form == StringForm::invalid);
    }
}

TEST_CASE("template matching is mutually exclusive") {
    // Independent re-statement of the four templates.
    const auto is_s1 = [](const std::vector<int>& s) {
        if (s.empty()) return false;
        for (int d : s)
            if (d != 1) return false;
        return true;
    };
    const auto is_s2 = [](const std::vector<int>& s) {
        if (s.size() < 2 || s.front() != 2 || s.back() != 0) return false;
        for (size_t i = 1; i + 1 < s.size(); ++i)
            if (s[i] != 1) return false;
        return true;
    };
    const auto is_s3 = [](const std::vector<int>& s) {
        if (s.size() < 3 || s.back() != 0 || s[s.size() - 2] != 2) return false;
        for (size_t i = 0; i + 2 < s.size(); ++i)
            if (s[i] != 1) return false;
        return s[0] == 1;
    };
    const auto is_s4 = [](const std::vector<int>& s) {
        if (s.size() < 4 || s.back() != 0) return false;
        int twos = 0;
        size_t two_at = 0;
        for (size_t i = 0; i + 1 < s.size(); ++i) {
            if (s[i] == 2) {
                ++twos;
                two_at = i;
            } else if (s[i] != 1) {
                return false;
            }
        }
        return twos == 1 && two_at >= 1 && two_at + 2 < s.size();
    };

    // Exhaust all digit strings of length <= 6.
    for (int len = 1; len <= 6; ++len) {
        std::vector<int> s(len, 0);
        const int total = 1;
        int combos = 1;
        for (int i = 0; i < len; ++i) combos *= 3;
        (void)total;
        for (int code = 0; code < combos; ++code) {
            int c = code;
            for (int i = 0; i < len; ++i) {
                s[i] = c % 3;
                c /= 3;
            }
            const int matches = int(is_s1(s)) + int(is_s2(s)) + int(is_s3(s)) + int(is_s4(s));
            REQUIRE(matches <= 1);
            const StringClass got = classify_string(s);
            if (is_s1(s)) CHECK(got.form == StringForm::s1);
            else if (is_s2(s)) CHECK(got.form == StringForm::s2);
            else if (is_s3(s)) CHECK(got.form == StringForm::s3);
            else if (is_s4(s)) CHECK(got.form == StringForm::s4);
            else CHECK(got.form == StringForm::invalid);
        }
    }
}

TEST_CASE("cooperative assignments") {
    const MessageAssignment five = comp_assignment(CompKind::thm4, 5);
    CHECK(five.order() == 2);
    CHECK(five.tset(1) == std::vector<int>{1, 2});
    CHECK(five.tset(2) == std::vector<int>{1, 2});
    CHECK(five.tset(3) == std::vector<int>{2, 3});
    CHECK(five.tset(4) == std::vector<int>{3, 4});
    CHECK(five.tset(5) == std::vector<int>{3, 4});
    const MessageAssignment ten = comp_assignment(CompKind::thm4, 10);
    CHECK(ten.tset(6) == std::vector<int>{6, 7});
    CHECK(ten.tset(10) == std::vector<int>{8, 9});
    CHECK_THROWS_AS(comp_assignment(CompKind::thm4, 7), std::invalid_argument);

    const MessageAssignment sliding = comp_assignment(CompKind::thm5, 3);
    CHECK(sliding.tset(1) == std::vector<int>{1});
    CHECK(sliding.tset(2) == std::vector<int>{1, 2});
    CHECK(sliding.tset(3) == std::vector<int>{2, 3});
    CHECK(sliding.order() == 2);
    CHECK(comp_assignment(CompKind::thm5, 1).order() == 1);
}

TEST_CASE("transmit-set averages are exact rationals") {
    using rational = boost::rational<long long>;
    CHECK(connected_fraction(comp_assignment(CompKind::thm4, 5)) == rational(8, 5));
    CHECK(connected_fraction(comp_assignment(CompKind::thm4, 20)) == rational(8, 5));
    for (int k : {3, 5, 8, 12})
        CHECK(connected_fraction(comp_assignment(CompKind::thm5, k)) ==
              rational(2 * k - 1, k));
    for (uint64_t mask : {uint64_t{0}, uint64_t{0x55}, uint64_t{0xff}})
        CHECK(connected_fraction(irreducible_m1_assignment(9, mask)) == rational(1));
}

TEST_CASE("assignment accessors and table rendering") {
    const MessageAssignment a = comp_assignment(CompKind::thm4, 5);
    CHECK(a.in_tset(3, 2));
    CHECK_FALSE(a.in_tset(3, 4));
    CHECK(a.tset_size(3) == 2);
    CHECK_THROWS_AS(a.carrier(3), std::logic_error);
    CHECK(a.to_table().substr(0, 9) == "1: {1,2}\n");

    CHECK_THROWS_AS(irreducible_m1_assignment(3, 0b100), std::invalid_argument);
    CHECK(irreducible_m1_count(4) == 8);
    // Mask bit i-2 moves T_i from {i} to {i-1}.
    CHECK(carriers_of(irreducible_m1_assignment(4, 0b010)) == std::vector<int>{1, 2, 2, 4});
}
