#pragma once

// Link-level model of a K-user linear interference network in which receiver i
// hears transmitter i (direct link) and transmitter i-1 (cross link), and each
// of the 2K-1 links is independently erased with probability p.

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace erasenet {

// A single on/off draw of all 2K-1 links.
//
// Link indexing (also the bit order used by to_mask/from_mask and the hex
// rendering): bit i-1 holds direct link H_{i,i} for i = 1..K, and bit K+j-1
// holds cross link H_{j+1,j} for j = 1..K-1.  Bit set means "present".
class LinkRealization {
public:
    explicit LinkRealization(int k) : k_(k), direct_(check_users(k), 0), cross_(k - 1, 0) {}

    static LinkRealization all_present(int k) {
        LinkRealization r(k);
        for (auto& b : r.direct_) b = 1;
        for (auto& b : r.cross_) b = 1;
        return r;
    }

    static LinkRealization all_absent(int k) { return LinkRealization(k); }

    int users() const { return k_; }
    int links() const { return 2 * k_ - 1; }

    // Direct link H_{i,i}, 1-based.
    bool direct(int i) const { return i >= 1 && i <= k_ && direct_[i - 1] != 0; }
    // Cross link H_{j+1,j} (transmitter j heard at receiver j+1), 1-based.
    bool cross(int j) const { return j >= 1 && j <= k_ - 1 && cross_[j - 1] != 0; }

    void set_direct(int i, bool present) {
        check_index(i, k_);
        direct_[i - 1] = present ? 1 : 0;
    }
    void set_cross(int j, bool present) {
        check_index(j, k_ - 1);
        cross_[j - 1] = present ? 1 : 0;
    }

    // Total connectivity query: true only for links that exist in the topology
    // (transmitter t is heard at receivers t and t+1) and are not erased.
    bool present(int receiver, int transmitter) const {
        if (transmitter < 1 || transmitter > k_ || receiver < 1 || receiver > k_) return false;
        if (receiver == transmitter) return direct_[receiver - 1] != 0;
        if (receiver == transmitter + 1) return cross_[transmitter - 1] != 0;
        return false;
    }

    uint64_t to_mask() const {
        check_mask_width(k_);
        uint64_t m = 0;
        for (int i = 1; i <= k_; ++i)
            if (direct_[i - 1]) m |= uint64_t{1} << (i - 1);
        for (int j = 1; j <= k_ - 1; ++j)
            if (cross_[j - 1]) m |= uint64_t{1} << (k_ + j - 1);
        return m;
    }

    static LinkRealization from_mask(int k, uint64_t mask) {
        check_mask_width(k);
        if (k < 32 && mask >> (2 * k - 1) != 0)
            throw std::invalid_argument("realization mask has bits beyond 2K-1 links");
        LinkRealization r(k);
        for (int i = 1; i <= k; ++i) r.direct_[i - 1] = (mask >> (i - 1)) & 1;
        for (int j = 1; j <= k - 1; ++j) r.cross_[j - 1] = (mask >> (k + j - 1)) & 1;
        return r;
    }

    // Lowercase hex of to_mask(), zero-padded to ceil((2K-1)/4) digits so the
    // width is a function of K alone.
    std::string to_hex() const {
        int width = hex_width(k_);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%0*llx", width,
                      static_cast<unsigned long long>(to_mask()));
        return std::string(buf);
    }

    static LinkRealization from_hex(int k, const std::string& hex) {
        check_mask_width(k);
        if (static_cast<int>(hex.size()) != hex_width(k))
            throw std::invalid_argument("hex realization has wrong width for K");
        uint64_t mask = 0;
        for (char c : hex) {
            int digit;
            if (c >= '0' && c <= '9') digit = c - '0';
            else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
            else throw std::invalid_argument("hex realization has non-hex character");
            mask = (mask << 4) | static_cast<uint64_t>(digit);
        }
        return from_mask(k, mask);  // re-validates the bit range
    }

    static int hex_width(int k) { return (2 * k - 1 + 3) / 4; }

    friend bool operator==(const LinkRealization& a, const LinkRealization& b) {
        return a.k_ == b.k_ && a.direct_ == b.direct_ && a.cross_ == b.cross_;
    }

private:
    static int check_users(int k) {
        if (k < 1) throw std::invalid_argument("network needs at least one user");
        return k;
    }
    static void check_index(int i, int limit) {
        if (i < 1 || i > limit) throw std::out_of_range("link index out of range");
    }
    static void check_mask_width(int k) {
        if (2 * k - 1 > 64) throw std::invalid_argument("bitmask form supports at most 32 users");
    }

    int k_;
    std::vector<uint8_t> direct_;  // direct_[i-1] = H_{i,i}
    std::vector<uint8_t> cross_;   // cross_[j-1]  = H_{j+1,j}
};

// Exhaustive enumeration is allowed only while 2K-1 stays within this budget
// (2^26 realizations), keeping full sweeps tractable.
inline constexpr int kMaxEnumLinks = 26;

inline uint64_t realization_count(int k) {
    if (2 * k - 1 > kMaxEnumLinks) throw std::invalid_argument("K over enumeration budget");
    return uint64_t{1} << (2 * k - 1);
}

// Visits every realization of a K-user network in ascending mask order
// (direct links occupy the low bits).  f receives (const LinkRealization&).
template <typename F>
void enumerate_realizations(int k, F&& f, int budget = kMaxEnumLinks) {
    if (2 * k - 1 > budget) throw std::invalid_argument("K over enumeration budget");
    const uint64_t total = uint64_t{1} << (2 * k - 1);
    for (uint64_t mask = 0; mask < total; ++mask) f(LinkRealization::from_mask(k, mask));
}

// Probability of one realization under i.i.d. erasure probability p:
// (1-p)^{#present} * p^{#absent} over all 2K-1 links.
inline double realization_probability(const LinkRealization& r, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
    double prob = 1.0;
    for (int i = 1; i <= r.users(); ++i) prob *= r.direct(i) ? (1.0 - p) : p;
    for (int j = 1; j + 1 <= r.users(); ++j) prob *= r.cross(j) ? (1.0 - p) : p;
    return prob;
}

// I.i.d. erasure draw parameters: each link is erased with probability p,
// independently across links and across stream indices.
struct ErasureModel {
    double p;
    uint64_t seed;

    ErasureModel(double p_, uint64_t seed_) : p(p_), seed(seed_) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p outside [0,1]");
    }
};

namespace detail {

inline constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer; a counter-based generator built from it lets every
// (seed, stream, link) triple be evaluated independently and in parallel.
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline uint64_t stream_base(uint64_t seed, uint64_t stream) {
    return mix64(mix64(seed + kGamma) ^ mix64((stream + 1) * kGamma));
}

// Uniform double in [0,1) from the link-indexed counter.
inline double link_uniform(uint64_t base, int link_index) {
    uint64_t z = mix64(base + kGamma * static_cast<uint64_t>(link_index + 1));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Draws one realization.  Deterministic in (k, model.p, model.seed, stream):
// link l (in mask bit order) is erased iff its uniform draw falls below p.
inline LinkRealization sample_realization(int k, const ErasureModel& model, uint64_t stream) {
    LinkRealization r(k);
    const uint64_t base = detail::stream_base(model.seed, stream);
    for (int i = 1; i <= k; ++i)
        r.set_direct(i, detail::link_uniform(base, i - 1) >= model.p);
    for (int j = 1; j <= k - 1; ++j)
        r.set_cross(j, detail::link_uniform(base, k + j - 1) >= model.p);
    return r;
}

}  // namespace erasenet
