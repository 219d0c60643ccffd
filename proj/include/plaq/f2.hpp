#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace plaq::f2 {

// Dense bit vector with symmetric-difference (xor) arithmetic.
class Bitset {
  public:
    Bitset() = default;
    explicit Bitset(int nbits) : nbits_(nbits), w_(size_t((nbits + 63) / 64), 0) {}

    int size() const { return nbits_; }
    bool test(int i) const { return (w_[size_t(i) >> 6] >> (i & 63)) & 1; }
    void set(int i) { w_[size_t(i) >> 6] |= uint64_t(1) << (i & 63); }
    void reset(int i) { w_[size_t(i) >> 6] &= ~(uint64_t(1) << (i & 63)); }
    void flip(int i) { w_[size_t(i) >> 6] ^= uint64_t(1) << (i & 63); }

    void operator^=(const Bitset& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    }
    friend Bitset operator^(Bitset a, const Bitset& b) {
        a ^= b;
        return a;
    }

    // xor o into *this and return the change in popcount.
    int xor_count_delta(const Bitset& o) {
        int d = 0;
        for (size_t k = 0; k < w_.size(); ++k) {
            if (!o.w_[k]) continue;
            int before = std::popcount(w_[k]);
            w_[k] ^= o.w_[k];
            d += std::popcount(w_[k]) - before;
        }
        return d;
    }

    int count() const {
        int c = 0;
        for (uint64_t w : w_) c += std::popcount(w);
        return c;
    }
    bool none() const {
        for (uint64_t w : w_)
            if (w) return false;
        return true;
    }
    int lowest_set() const {
        for (size_t k = 0; k < w_.size(); ++k)
            if (w_[k]) return int(k * 64) + std::countr_zero(w_[k]);
        return -1;
    }
    friend bool operator==(const Bitset& a, const Bitset& b) { return a.w_ == b.w_; }

    template <typename F>
    void for_each_set(F&& f) const {
        for (size_t k = 0; k < w_.size(); ++k) {
            uint64_t w = w_[k];
            while (w) {
                f(int(k * 64) + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }
    const std::vector<uint64_t>& words() const { return w_; }
    size_t hash() const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (uint64_t w : w_) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return size_t(h);
    }

  private:
    int nbits_ = 0;
    std::vector<uint64_t> w_;
};

struct BitsetHash {
    size_t operator()(const Bitset& b) const { return b.hash(); }
};

// Gaussian elimination over F2 with combination tracking: rows live over a
// value space, trackers record which input vectors were combined.
class Eliminator {
  public:
    Eliminator(int value_bits, int tracker_bits)
        : value_bits_(value_bits), tracker_bits_(tracker_bits) {}

    // Feed input vector number `tag`. Returns true when it was independent of
    // everything fed so far; otherwise the xor-combination of earlier inputs
    // reproducing it is appended to relations().
    bool add(const Bitset& v, int tag);

    // Express target over the fed inputs. Returns the tracker combination, or
    // nullopt when the target is not in the span.
    std::optional<Bitset> solve(const Bitset& target) const;

    int rank() const { return int(rows_.size()); }
    const std::vector<Bitset>& relations() const { return relations_; }
    const std::vector<Bitset>& rows() const { return rows_; }
    const std::vector<Bitset>& row_trackers() const { return trackers_; }

  private:
    int value_bits_;
    int tracker_bits_;
    std::vector<Bitset> rows_;      // reduced, one pivot each
    std::vector<Bitset> trackers_;  // input combination per row
    std::vector<int> pivots_;
    std::vector<Bitset> relations_;
};

// Reduce a generating family to an independent one (drops dependents).
std::vector<Bitset> independent_subset(const std::vector<Bitset>& gens, int nbits);

// Enumerate the span of an independent family by Gray code. The visitor sees
// every element exactly once (including the zero vector first) as
// (current, popcount).
void enumerate_span(const std::vector<Bitset>& independent_gens, int nbits,
                    const std::function<void(const Bitset&, int)>& visit);

}  // namespace plaq::f2
