#pragma once

// Message-to-transmitter assignments.  Each message W_i owns a transmit set
// T_i of one or two transmitters; the assignment order M is the largest
// transmit-set size.  Irreducible order-1 assignments draw each singleton
// T_i from {i-1, i} (the only transmitters heard by receiver i) and are
// described equivalently by a load vector (how many messages each
// transmitter carries) or by a short repeating "strategy string" of
// per-transmitter loads.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace erasenet {

class MessageAssignment {
public:
    // M=1 constructor: carriers[i-1] is the single transmitter for W_i.
    static MessageAssignment from_carriers(std::vector<int> carriers) {
        std::vector<std::vector<int>> tsets(carriers.size());
        for (size_t i = 0; i < carriers.size(); ++i) tsets[i] = {carriers[i]};
        return from_tsets(std::move(tsets));
    }

    static MessageAssignment from_tsets(std::vector<std::vector<int>> tsets) {
        const int k = static_cast<int>(tsets.size());
        if (k < 1) throw std::invalid_argument("assignment needs at least one message");
        MessageAssignment a;
        a.k_ = k;
        a.m_ = 1;
        a.tsets_.resize(k);
        for (int i = 1; i <= k; ++i) {
            auto& src = tsets[i - 1];
            std::sort(src.begin(), src.end());
            src.erase(std::unique(src.begin(), src.end()), src.end());
            if (src.empty() || src.size() > 2)
                throw std::invalid_argument("transmit set must hold one or two transmitters");
            for (int t : src)
                if (t < 1 || t > k)
                    throw std::invalid_argument("transmitter index out of range");
            a.tsets_[i - 1] = {src.front(), src.size() == 2 ? src.back() : 0};
            a.m_ = std::max(a.m_, static_cast<int>(src.size()));
        }
        return a;
    }

    int users() const { return k_; }
    // Assignment order: the largest transmit-set size.
    int order() const { return m_; }

    std::vector<int> tset(int i) const {
        check_message(i);
        const auto& e = tsets_[i - 1];
        if (e[1] == 0) return {e[0]};
        return {e[0], e[1]};
    }

    int tset_size(int i) const {
        check_message(i);
        return tsets_[i - 1][1] == 0 ? 1 : 2;
    }

    bool in_tset(int i, int t) const {
        check_message(i);
        return tsets_[i - 1][0] == t || tsets_[i - 1][1] == t;
    }

    // Sole carrier of W_i; only meaningful for order-1 assignments.
    int carrier(int i) const {
        check_message(i);
        if (tsets_[i - 1][1] != 0)
            throw std::logic_error("carrier() requires an order-1 assignment");
        return tsets_[i - 1][0];
    }

    // True when every message has exactly one carrier, drawn from {i-1, i}
    // (so T_1 = {1}): the normal form every single-carrier assignment of
    // interest reduces to, and the shape the chain oracle relies on.
    bool irreducible_m1() const {
        if (m_ != 1) return false;
        for (int i = 1; i <= k_; ++i) {
            const int c = tsets_[i - 1][0];
            if (c != i && c != i - 1) return false;
        }
        return tsets_[0][0] == 1;
    }

    // One line per message: "i: {t}" or "i: {a,b}".
    std::string to_table() const {
        std::string out;
        for (int i = 1; i <= k_; ++i) {
            out += std::to_string(i) + ": {" + std::to_string(tsets_[i - 1][0]);
            if (tsets_[i - 1][1] != 0) out += "," + std::to_string(tsets_[i - 1][1]);
            out += "}\n";
        }
        return out;
    }

    friend bool operator==(const MessageAssignment& a, const MessageAssignment& b) {
        return a.k_ == b.k_ && a.tsets_ == b.tsets_;
    }

private:
    void check_message(int i) const {
        if (i < 1 || i > k_) throw std::out_of_range("message index out of range");
    }

    int k_ = 0;
    int m_ = 1;
    // tsets_[i-1] = {lo, hi} with hi == 0 when the set is a singleton.
    std::vector<std::array<int, 2>> tsets_;
};

// Per-transmitter message counts N_j for an order-1 assignment.
using LoadVector = std::vector<int>;

// Inverts a load vector into the unique order-1 assignment that produces it:
// after each transmitter with load 0 the network splits; within a segment the
// unique transmitter y with load 2 separates messages sent on their own index
// (i <= y) from messages sent one step left (i > y); a trailing all-ones
// segment assigns every message its own transmitter.
inline MessageAssignment assignment_from_load_vector(const LoadVector& loads) {
    const int k = static_cast<int>(loads.size());
    const auto fail = [] { throw std::invalid_argument("not a valid irreducible load vector"); };
    if (k < 1) fail();
    std::vector<int> carriers(k, 0);
    int s = 1;  // start of the current segment
    while (s <= k) {
        int x = s;
        while (x <= k && loads[x - 1] != 0) ++x;
        if (x > k) {
            // Trailing segment without a zero: must be all ones.
            for (int i = s; i <= k; ++i) {
                if (loads[i - 1] != 1) fail();
                carriers[i - 1] = i;
            }
            break;
        }
        // Segment s..x ends at the zero-load transmitter x.
        int y = 0;
        for (int i = s; i < x; ++i) {
            if (loads[i - 1] == 2) {
                if (y != 0) fail();
                y = i;
            } else if (loads[i - 1] != 1) {
                fail();
            }
        }
        if (y == 0) fail();  // a zero needs a matching double-loaded transmitter
        for (int i = s; i <= x; ++i) carriers[i - 1] = i <= y ? i : i - 1;
        s = x + 1;
    }
    return MessageAssignment::from_carriers(std::move(carriers));
}

// Per-transmitter message counts of an order-1 assignment.
inline LoadVector load_vector(const MessageAssignment& a) {
    if (!a.irreducible_m1())
        throw std::invalid_argument("load vector requires an order-1 assignment");
    LoadVector loads(a.users(), 0);
    for (int i = 1; i <= a.users(); ++i) ++loads[a.carrier(i) - 1];
    return loads;
}

// Strategy strings: a short load pattern S_1..S_n tiled across the network.
enum class StringForm { s1, s2, s3, s4, invalid };

struct StringClass {
    StringForm form;
    int n_ones;  // number of 1-digits in the string
};

// Classifies a digit string against the four canonical templates:
//   s1: all ones                  (1, 1, ..., 1)
//   s2: (2, 1...1, 0)             zero or more middle ones
//   s3: (1...1, 2, 0)             one or more leading ones
//   s4: (1...1, 2, 1...1, 0)      ones on both sides of the 2
// The templates are mutually exclusive; anything else is invalid.
inline StringClass classify_string(const std::vector<int>& s) {
    const int n = static_cast<int>(s.size());
    int ones = 0;
    bool digits_ok = n >= 1;
    for (int d : s) {
        if (d < 0 || d > 2) digits_ok = false;
        if (d == 1) ++ones;
    }
    const auto all_ones_between = [&](int lo, int hi) {  // inclusive, 0-based
        for (int i = lo; i <= hi; ++i)
            if (s[i] != 1) return false;
        return true;
    };
    if (!digits_ok) return {StringForm::invalid, ones};
    if (all_ones_between(0, n - 1)) return {StringForm::s1, ones};
    if (n >= 2 && s[n - 1] == 0) {
        if (s[0] == 2 && all_ones_between(1, n - 2)) return {StringForm::s2, ones};
        // locate the single 2 for the s3/s4 shapes
        int two = -1;
        bool shape_ok = true;
        for (int i = 0; i < n - 1; ++i) {
            if (s[i] == 2) {
                if (two != -1) shape_ok = false;
                two = i;
            } else if (s[i] != 1) {
                shape_ok = false;
            }
        }
        if (shape_ok && two >= 1) {
            if (two == n - 2) return {StringForm::s3, ones};
            return {StringForm::s4, ones};
        }
    }
    return {StringForm::invalid, ones};
}

// Tiles the string across K messages: transmitter i gets load S_{((i-1) mod n)+1}
// for the first n*floor(K/n) positions and load 1 on the tail, then inverts the
// resulting load vector.
inline MessageAssignment assignment_from_string(const std::vector<int>& s, int k) {
    const int n = static_cast<int>(s.size());
    if (n < 1) throw std::invalid_argument("empty strategy string");
    const int sum = std::accumulate(s.begin(), s.end(), 0);
    if (sum != n) throw std::invalid_argument("strategy string loads must sum to its length");
    if (k < n) throw std::invalid_argument("K smaller than the strategy string");
    LoadVector loads(k, 1);
    const int tiled = n * (k / n);
    for (int i = 1; i <= tiled; ++i) loads[i - 1] = s[(i - 1) % n];
    return assignment_from_load_vector(loads);
}

// The 2^(K-1) order-1 assignments, indexed by a mask: T_1 = {1} always, and
// bit i-2 chooses T_i = {i-1} (set) or T_i = {i} (clear).
inline MessageAssignment irreducible_m1_assignment(int k, uint64_t mask) {
    if (k < 1 || k > 64) throw std::invalid_argument("K out of range");
    if (mask >> (k - 1) != 0 && k > 1)
        throw std::invalid_argument("assignment mask has bits beyond K-1");
    if (k == 1 && mask != 0)
        throw std::invalid_argument("assignment mask has bits beyond K-1");
    std::vector<int> carriers(k);
    carriers[0] = 1;
    for (int i = 2; i <= k; ++i) carriers[i - 1] = ((mask >> (i - 2)) & 1) ? i - 1 : i;
    return MessageAssignment::from_carriers(std::move(carriers));
}

inline uint64_t irreducible_m1_count(int k) {
    if (k < 1 || k > 64) throw std::invalid_argument("K out of range");
    return uint64_t{1} << (k - 1);
}

// Composite (order-2) assignments used by the two cooperative schedulers.
enum class CompKind { thm4, thm5 };

inline MessageAssignment comp_assignment(CompKind kind, int k) {
    if (k < 1) throw std::invalid_argument("assignment needs at least one message");
    std::vector<std::vector<int>> tsets(k);
    if (kind == CompKind::thm4) {
        if (k % 5 != 0)
            throw std::invalid_argument("this assignment needs K divisible by 5");
        for (int i = 1; i <= k; ++i) {
            if (i % 5 == 1) tsets[i - 1] = {i, i + 1};
            else if (i % 5 == 0) tsets[i - 1] = {i - 2, i - 1};
            else tsets[i - 1] = {i - 1, i};
        }
    } else {
        for (int i = 1; i <= k; ++i) {
            if (i == 1) tsets[0] = {1};
            else tsets[i - 1] = {i - 1, i};
        }
    }
    return MessageAssignment::from_tsets(std::move(tsets));
}

// Average number of transmitters per transmit set that the receiver actually
// hears, exactly: sum_i |T_i ∩ {i-1, i}| / K.
inline boost::rational<long long> connected_fraction(const MessageAssignment& a) {
    long long total = 0;
    for (int i = 1; i <= a.users(); ++i)
        for (int t : a.tset(i))
            if (t == i - 1 || t == i) ++total;
    return {total, a.users()};
}

}  // namespace erasenet
