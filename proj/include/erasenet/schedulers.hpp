#pragma once

// Per-realization schedulers: rule-based message delivery for five fixed
// transmission schemes, an optimal order-1 oracle, and an outcome validator.
//
// A scheduler sees one link realization and decides which messages are
// delivered and which transmitter serves each delivered message.  Delivery is
// legitimate only if the serving link is present, no transmitter serves two
// messages, and any interference a serving transmitter causes at another
// delivered receiver can be cancelled by that victim message's other
// transmitter (order-2 assignments only; order-1 assignments have no second
// transmitter, so victims must simply hear no foreign serving transmitter).

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "erasenet/assignment.hpp"
#include "erasenet/topology.hpp"

namespace erasenet {

enum class SchemeId { scheme1, scheme2, scheme3, thm4, thm5, oracle_m1 };

inline const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::scheme1: return "scheme1";
        case SchemeId::scheme2: return "scheme2";
        case SchemeId::scheme3: return "scheme3";
        case SchemeId::thm4: return "thm4";
        case SchemeId::thm5: return "thm5";
        case SchemeId::oracle_m1: return "oracle";
    }
    return "?";
}

inline SchemeId parse_scheme(const std::string& name) {
    if (name == "scheme1") return SchemeId::scheme1;
    if (name == "scheme2") return SchemeId::scheme2;
    if (name == "scheme3") return SchemeId::scheme3;
    if (name == "thm4") return SchemeId::thm4;
    if (name == "thm5") return SchemeId::thm5;
    if (name == "oracle" || name == "oracle_m1") return SchemeId::oracle_m1;
    throw std::invalid_argument(
        "unknown scheme '" + name +
        "' (expected scheme1|scheme2|scheme3|thm4|thm5|oracle)");
}

// Block length each scheme's delivery pattern repeats over (1 = no blocking).
inline int scheme_block(SchemeId s) {
    switch (s) {
        case SchemeId::scheme2: return 3;
        case SchemeId::scheme3: return 4;
        case SchemeId::thm4: return 5;
        default: return 1;
    }
}

// The assignment each rule-based scheme schedules against.
inline MessageAssignment scheme_assignment(SchemeId s, int k) {
    switch (s) {
        case SchemeId::scheme1: return assignment_from_string({1}, k);
        case SchemeId::scheme2: return assignment_from_string({2, 1, 0}, k);
        case SchemeId::scheme3: return assignment_from_string({1, 2, 1, 0}, k);
        case SchemeId::thm4: return comp_assignment(CompKind::thm4, k);
        case SchemeId::thm5: return comp_assignment(CompKind::thm5, k);
        case SchemeId::oracle_m1:
            throw std::invalid_argument("the oracle needs an explicit assignment");
    }
    throw std::invalid_argument("unknown scheme");
}

struct ScheduleOutcome {
    std::vector<uint8_t> delivered;  // delivered[i-1] for message i
    std::vector<int> server;         // serving transmitter, 0 when undelivered

    explicit ScheduleOutcome(int k = 0) : delivered(k, 0), server(k, 0) {}

    int users() const { return static_cast<int>(delivered.size()); }
    bool is_delivered(int i) const { return delivered[i - 1] != 0; }

    int count() const {
        int n = 0;
        for (uint8_t d : delivered) n += d;
        return n;
    }

    void deliver(int i, int transmitter) {
        delivered[i - 1] = 1;
        server[i - 1] = transmitter;
    }
};

// --- scheme1: every message on its own transmitter, alternating delivery ---
//
// Within each maximal stretch of users whose direct links and connecting
// cross links are all present, every second user is served.  Normally the
// odd-indexed users win; a stretch whose first and last users are both even
// (necessarily of odd size) instead serves its even-indexed users, which is
// what an optimal schedule does there.  Users outside any stretch (direct
// link erased) get nothing.
inline ScheduleOutcome schedule_scheme1(const LinkRealization& r) {
    const int k = r.users();
    ScheduleOutcome out(k);
    int a = 1;
    while (a <= k) {
        if (!r.direct(a)) {
            ++a;
            continue;
        }
        int b = a;
        while (b + 1 <= k && r.cross(b) && r.direct(b + 1)) ++b;
        const int win_parity = (a % 2 == 0 && b % 2 == 0) ? 0 : 1;
        for (int i = a; i <= b; ++i)
            if (i % 2 == win_parity) out.deliver(i, i);
        a = b + 1;
    }
    return out;
}

namespace detail {

// Shared tail rule for the block schemes: leftover users past the last whole
// block each use their own transmitter, and the transmitter before the tail
// is always silent, so the first (and third) tail user only needs its direct
// link while the middle one defers to delivered neighbours.
inline void schedule_tail(const LinkRealization& r, int first, ScheduleOutcome& out) {
    const int k = r.users();
    for (int i = first; i <= k; ++i) {
        const int pos = i - first + 1;
        if (pos == 2) {
            if (r.direct(i) && (!r.direct(i - 1) || !r.cross(i - 1)) &&
                (!r.cross(i) || !r.direct(i + 1)))
                out.deliver(i, i);
        } else {
            if (r.direct(i)) out.deliver(i, i);
        }
    }
}

}  // namespace detail

// --- scheme2: blocks of three over the load pattern (2,1,0) ---
//
// In each block {j+1, j+2, j+3} transmitter j+1 carries the first two
// messages, transmitter j+2 carries the third, and transmitter j+3 stays
// silent, so blocks never interact.  The first message needs its direct
// link; the third needs its cross link; the middle message is served off
// transmitter j+1 only when that transmitter's direct link is erased and at
// least one of the links that would corrupt or collide with it is erased too.
inline ScheduleOutcome schedule_scheme2(const LinkRealization& r) {
    const int k = r.users();
    ScheduleOutcome out(k);
    const int blocks = k / 3;
    for (int m = 0; m < blocks; ++m) {
        const int j = 3 * m;
        const bool d1 = r.direct(j + 1), c1 = r.cross(j + 1);
        const bool d2 = r.direct(j + 2), c2 = r.cross(j + 2);
        if (d1) out.deliver(j + 1, j + 1);
        if (c1 && !d1 && (!d2 || !c2)) out.deliver(j + 2, j + 1);
        if (c2) out.deliver(j + 3, j + 2);
    }
    detail::schedule_tail(r, 3 * blocks + 1, out);
    return out;
}

// --- scheme3: blocks of four over the load pattern (1,2,1,0) ---
//
// Transmitters j+1..j+3 carry messages (1), (2,3), (4); transmitter j+4 is
// silent.  Base rules serve W_{j+1} and W_{j+3} off their strongest links and
// let W_{j+2}, W_{j+4} in only when the links that would interfere are
// erased.  One special pattern — everything present except W_{j+1}'s service
// — swaps the block to serving {W_{j+2}, W_{j+4}}, which beats the base pair.
inline ScheduleOutcome schedule_scheme3(const LinkRealization& r) {
    const int k = r.users();
    ScheduleOutcome out(k);
    const int blocks = k / 4;
    for (int m = 0; m < blocks; ++m) {
        const int j = 4 * m;
        const bool d1 = r.direct(j + 1), c1 = r.cross(j + 1);
        const bool d2 = r.direct(j + 2), c2 = r.cross(j + 2);
        const bool d3 = r.direct(j + 3), c3 = r.cross(j + 3);
        if (d1) out.deliver(j + 1, j + 1);
        if ((!d1 || !c1) && d2 && c2 && d3 && c3) {
            out.deliver(j + 2, j + 2);
            out.deliver(j + 4, j + 3);
            continue;
        }
        if (d2 && !c2 && (!c1 || !d1)) out.deliver(j + 2, j + 2);
        if (c2) out.deliver(j + 3, j + 2);
        if (c3 && (!d3 || !c2)) out.deliver(j + 4, j + 3);
    }
    detail::schedule_tail(r, 4 * blocks + 1, out);
    return out;
}

// --- thm4: order-2 blocks of five ---
//
// Each block uses transmitters o+1..o+4 (o+5 silent) with transmit sets
// {1,2},{1,2},{2,3},{3,4},{3,4} relative to the block.  The outer messages
// W1/W5 ride their dedicated links; W3 is opportunistic, served by X3 or X2
// exactly when the neighbouring delivery it would collide with is absent or
// can step aside; W2/W4 prefer their direct/cross service but move to the
// outer transmitter (X1/X4) either when their primary link pattern demands it
// or to vacate a transmitter W3's delivery needs cancelled.
inline ScheduleOutcome schedule_thm4(const LinkRealization& r) {
    const int k = r.users();
    if (k % 5 != 0) throw std::invalid_argument("this scheme needs K divisible by 5");
    ScheduleOutcome out(k);
    for (int o = 0; o < k; o += 5) {
        const bool h11 = r.direct(o + 1), h21 = r.cross(o + 1);
        const bool h22 = r.direct(o + 2), h32 = r.cross(o + 2);
        const bool h33 = r.direct(o + 3), h43 = r.cross(o + 3);
        const bool h44 = r.direct(o + 4), h54 = r.cross(o + 4);

        const bool w3x3 = h33 && !h43 && (!h22 || !h32 || (!h11 && h21));
        const bool w3x2 = !w3x3 && h32 && !h22 && (!h43 || !h33 || (!h54 && h44));

        if (h11) out.deliver(o + 1, o + 1);
        if (h22)
            out.deliver(o + 2, (w3x3 && h32) ? o + 1 : o + 2);
        else if (h21 && !h11)
            out.deliver(o + 2, o + 1);
        if (w3x3)
            out.deliver(o + 3, o + 3);
        else if (w3x2)
            out.deliver(o + 3, o + 2);
        if (h43)
            out.deliver(o + 4, (w3x2 && h33) ? o + 4 : o + 3);
        else if (h44 && !h54)
            out.deliver(o + 4, o + 4);
        if (h54) out.deliver(o + 5, o + 4);
    }
    return out;
}

namespace detail {

// Left-to-right pass behind the thm5 scheme.  residue_shift makes user i
// behave as if its index were i + residue_shift; the marginal computation
// uses this to give a short strip every interior residue pattern.
inline ScheduleOutcome thm5_pass(const LinkRealization& r, int residue_shift) {
    const int k = r.users();
    ScheduleOutcome out(k);
    bool reserve_next = false;
    for (int i = 1; i <= k; ++i) {
        const int rem = (i + residue_shift) % 3;
        if (rem == 1) {
            if (r.present(i, i - 1) && !r.present(i - 1, i - 1)) {
                out.deliver(i, i - 1);
            } else if (r.present(i, i) &&
                       (!r.present(i, i - 1) ||
                        (r.present(i - 1, i - 1) && r.present(i - 1, i - 2)))) {
                out.deliver(i, i);
            }
        } else if (rem == 2) {
            const bool c1 = r.present(i, i - 1);
            const bool c2 = !r.present(i - 1, i - 1) || !out.is_delivered(i - 1);
            const bool danger = r.present(i, i) && r.present(i + 1, i);
            const bool escape = r.present(i + 1, i + 1) && !r.present(i + 2, i + 1);
            if (c1 && c2 && (!danger || escape)) {
                out.deliver(i, i - 1);
                if (danger) reserve_next = true;
            } else if (r.present(i, i) && !r.present(i + 1, i) &&
                       (!r.present(i, i - 1) ||
                        (out.is_delivered(i - 1) && out.server[i - 2] == i - 2))) {
                out.deliver(i, i);
            }
        } else {
            const bool reserved = reserve_next;
            reserve_next = false;
            if (reserved) {
                if (r.present(i, i)) out.deliver(i, i);
            } else if (r.present(i, i - 1)) {
                out.deliver(i, i - 1);
            } else if (r.present(i, i)) {
                out.deliver(i, i);
            }
        }
    }
    return out;
}

}  // namespace detail

// --- thm5: order-2 sliding pass, any K ---
//
// Transmit sets T_1 = {1}, T_i = {i-1, i}.  Users are visited left to right
// in a period-3 pattern: each residue-1 user prefers stealing its left
// transmitter when that transmitter's own direct link is down; each
// residue-2 user likewise steals its left transmitter, but when doing so
// would jam its own direct successor it first checks an escape hatch — the
// next user can fall back to its own transmitter — and reserves that
// transmitter; each residue-0 user honours the reservation, else takes
// whichever of its two transmitters still reaches it (left first).
inline ScheduleOutcome schedule_thm5(const LinkRealization& r) {
    return detail::thm5_pass(r, 0);
}

inline ScheduleOutcome schedule(SchemeId s, const LinkRealization& r) {
    switch (s) {
        case SchemeId::scheme1: return schedule_scheme1(r);
        case SchemeId::scheme2: return schedule_scheme2(r);
        case SchemeId::scheme3: return schedule_scheme3(r);
        case SchemeId::thm4: return schedule_thm4(r);
        case SchemeId::thm5: return schedule_thm5(r);
        case SchemeId::oracle_m1:
            throw std::invalid_argument("the oracle needs an explicit assignment");
    }
    throw std::invalid_argument("unknown scheme");
}

// --- outcome validation ---

struct Violation {
    int message;      // offending (or victim) message
    int transmitter;  // transmitter involved
    std::string clause;
};

// Checks an outcome against the delivery rules: serving transmitter must be
// in the message's transmit set with its link present, no transmitter serves
// two messages, and interference caused at another delivered receiver must be
// cancellable by another transmitter holding the interfering message.
inline std::vector<Violation> validate_outcome(const LinkRealization& r,
                                               const MessageAssignment& a,
                                               const ScheduleOutcome& o) {
    const int k = r.users();
    if (a.users() != k || o.users() != k)
        throw std::invalid_argument("realization, assignment, and outcome disagree on K");
    std::vector<Violation> violations;
    std::vector<int> serving(k + 1, 0);  // serving[t] = message served by X_t
    for (int i = 1; i <= k; ++i) {
        if (!o.is_delivered(i)) continue;
        const int t = o.server[i - 1];
        if (t < 1 || t > k || !a.in_tset(i, t)) {
            violations.push_back({i, t, "server not in transmit set"});
            continue;
        }
        if (!r.present(i, t)) violations.push_back({i, t, "absent serving link"});
        if (serving[t] != 0)
            violations.push_back({i, t, "transmitter serves two messages"});
        else
            serving[t] = i;
    }
    // Interference: a served message heard at another delivered receiver must
    // be cancellable there, which needs a second transmitter holding the same
    // message whose link into the victim receiver is present.
    for (int j = 1; j <= k; ++j) {
        if (!o.is_delivered(j)) continue;
        const int t = o.server[j - 1];
        if (t < 1 || t > k) continue;
        for (int v : {t, t + 1}) {
            if (v < 1 || v > k || v == j) continue;
            if (!o.is_delivered(v) || !r.present(v, t)) continue;
            bool cancelled = false;
            for (int t2 : a.tset(j))
                if (t2 != t && r.present(v, t2)) cancelled = true;
            if (!cancelled) violations.push_back({v, t, "unresolvable interference"});
        }
    }
    return violations;
}

inline bool outcome_valid(const LinkRealization& r, const MessageAssignment& a,
                          const ScheduleOutcome& o) {
    return validate_outcome(r, a, o).empty();
}

// --- optimal order-1 oracle ---

namespace detail {

constexpr int kNegInf = -(1 << 28);

// Two adjacent messages can be delivered together only if their carriers
// differ and neither carrier is heard at the other delivered receiver.
inline bool pair_ok(const LinkRealization& r, const std::vector<int>& c, int i) {
    return c[i] != c[i + 1] && !r.present(i + 1, c[i]) && !r.present(i, c[i + 1]);
}

}  // namespace detail

// Maximum number of simultaneously deliverable messages under an order-1
// assignment.  Because each carrier is heard only at its own and the next
// receiver, conflicts involve adjacent messages only, so a two-state chain
// DP (last message delivered or not) is exact.
inline int oracle_m1(const LinkRealization& r, const MessageAssignment& a) {
    if (!a.irreducible_m1())
        throw std::invalid_argument("oracle_m1 requires an order-1 assignment");
    if (a.users() != r.users())
        throw std::invalid_argument("assignment and realization disagree on K");
    const int k = r.users();
    std::vector<int> c(k + 2, 0);
    for (int i = 1; i <= k; ++i) c[i] = a.carrier(i);
    int del = r.present(1, c[1]) ? 1 : detail::kNegInf;
    int not_del = 0;
    for (int i = 2; i <= k; ++i) {
        const bool feasible = r.present(i, c[i]);
        const int with_prev = detail::pair_ok(r, c, i - 1) ? del : detail::kNegInf;
        const int new_del = feasible ? 1 + std::max(not_del, with_prev) : detail::kNegInf;
        const int new_not = std::max(del, not_del);
        del = new_del;
        not_del = new_not;
    }
    return std::max(del, not_del);
}

// One optimal delivered set (deterministic tie-breaking), as a schedule.
inline ScheduleOutcome oracle_m1_outcome(const LinkRealization& r,
                                         const MessageAssignment& a) {
    if (!a.irreducible_m1())
        throw std::invalid_argument("oracle_m1 requires an order-1 assignment");
    if (a.users() != r.users())
        throw std::invalid_argument("assignment and realization disagree on K");
    const int k = r.users();
    std::vector<int> c(k + 2, 0);
    for (int i = 1; i <= k; ++i) c[i] = a.carrier(i);
    std::vector<int> del(k + 1, detail::kNegInf), not_del(k + 1, 0);
    del[1] = r.present(1, c[1]) ? 1 : detail::kNegInf;
    for (int i = 2; i <= k; ++i) {
        const bool feasible = r.present(i, c[i]);
        const int with_prev = detail::pair_ok(r, c, i - 1) ? del[i - 1] : detail::kNegInf;
        del[i] = feasible ? 1 + std::max(not_del[i - 1], with_prev) : detail::kNegInf;
        not_del[i] = std::max(del[i - 1], not_del[i - 1]);
    }
    ScheduleOutcome out(k);
    bool delivered = del[k] >= not_del[k];
    for (int i = k; i >= 1; --i) {
        if (delivered) {
            out.deliver(i, c[i]);
            if (i > 1) {
                const int with_prev =
                    detail::pair_ok(r, c, i - 1) ? del[i - 1] : detail::kNegInf;
                delivered = with_prev >= not_del[i - 1];
            }
        } else if (i > 1) {
            delivered = del[i - 1] >= not_del[i - 1];
        }
    }
    return out;
}

// Independent check of oracle_m1 by direct search over delivered sets with
// explicit validity tests; exponential, so limited to K <= 20.
inline int oracle_bruteforce_m1(const LinkRealization& r, const MessageAssignment& a) {
    if (!a.irreducible_m1())
        throw std::invalid_argument("oracle needs an order-1 assignment");
    if (a.users() != r.users())
        throw std::invalid_argument("assignment and realization disagree on K");
    const int k = r.users();
    if (k > 20) throw std::invalid_argument("brute force limited to K <= 20");
    std::vector<int> c(k + 1, 0);
    uint32_t feasible = 0;
    for (int i = 1; i <= k; ++i) {
        c[i] = a.carrier(i);
        if (r.present(i, c[i])) feasible |= uint32_t{1} << (i - 1);
    }
    int best = 0;
    for (uint32_t set = 0; set < (uint32_t{1} << k); ++set) {
        if ((set & ~feasible) != 0) continue;
        const int size = std::popcount(set);
        if (size <= best) continue;
        bool valid = true;
        std::vector<int> uses(k + 1, 0);
        for (int i = 1; valid && i <= k; ++i) {
            if (((set >> (i - 1)) & 1) == 0) continue;
            if (++uses[c[i]] > 1) valid = false;
            for (int v : {c[i], c[i] + 1}) {
                if (v < 1 || v > k || v == i) continue;
                if (((set >> (v - 1)) & 1) != 0 && r.present(v, c[i])) valid = false;
            }
        }
        if (valid) best = size;
    }
    return best;
}

}  // namespace erasenet
