#pragma once

// Decomposition of a realized network under an order-1 assignment into
// independent subnetworks, split wherever an erasure isolates the users on
// either side.

#include <stdexcept>
#include <string>
#include <vector>

#include "erasenet/assignment.hpp"
#include "erasenet/topology.hpp"

namespace erasenet {

struct SubnetworkRange {
    int start;    // first user, 1-based
    int end;      // last user, inclusive
    bool atomic;  // carriers successive and every in-range carrier link present

    friend bool operator==(const SubnetworkRange& a, const SubnetworkRange& b) {
        return a.start == b.start && a.end == b.end && a.atomic == b.atomic;
    }
};

// Splits users 1..K into the finest partition of contiguous ranges such that
// no message in one range can interfere with a receiver in the next: the cut
// before user i is legal when W_{i-1}'s carrier either lost its serving link
// to receiver i-1 or is not connected to receiver i.  Each range is flagged
// atomic when the carriers of its messages have successive indices and every
// link from one of those carriers to a receiver inside the range is present.
inline std::vector<SubnetworkRange> split_subnetworks(const LinkRealization& r,
                                                      const MessageAssignment& a) {
    if (!a.irreducible_m1())
        throw std::invalid_argument("subnetwork split requires an order-1 assignment");
    if (a.users() != r.users())
        throw std::invalid_argument("assignment and realization disagree on K");
    const int k = r.users();

    const auto cut_before = [&](int i) {  // valid for 2 <= i <= k
        const int c = a.carrier(i - 1);
        return !r.present(i - 1, c) || !r.present(i, c);
    };

    const auto atomic = [&](int s, int e) {
        for (int i = s + 1; i <= e; ++i)
            if (a.carrier(i) - a.carrier(i - 1) > 1) return false;  // skipped transmitter
        for (int i = s; i <= e; ++i) {
            const int t = a.carrier(i);
            for (int receiver : {t, t + 1})
                if (receiver >= s && receiver <= e && !r.present(receiver, t)) return false;
        }
        return true;
    };

    std::vector<SubnetworkRange> ranges;
    int s = 1;
    for (int i = 2; i <= k + 1; ++i) {
        if (i == k + 1 || cut_before(i)) {
            ranges.push_back({s, i - 1, atomic(s, i - 1)});
            s = i;
        }
    }
    return ranges;
}

// Compact bracketed rendering, e.g. "[1..2][3..5*]" — one bracket per range,
// an asterisk marking atomic ranges, single-user ranges rendered as "[4]".
inline std::string render_decomposition(const std::vector<SubnetworkRange>& ranges) {
    std::string out;
    for (const auto& g : ranges) {
        out += '[';
        out += std::to_string(g.start);
        if (g.end != g.start) {
            out += "..";
            out += std::to_string(g.end);
        }
        if (g.atomic) out += '*';
        out += ']';
    }
    return out;
}

}  // namespace erasenet
