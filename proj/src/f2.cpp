#include "plaq/f2.hpp"

#include <stdexcept>

namespace plaq::f2 {

bool Eliminator::add(const Bitset& v, int tag) {
    Bitset r = v;
    Bitset t(tracker_bits_);
    if (tag >= 0) t.set(tag);
    for (size_t i = 0; i < rows_.size(); ++i) {
        if (r.test(pivots_[i])) {
            r ^= rows_[i];
            t ^= trackers_[i];
        }
    }
    if (r.none()) {
        relations_.push_back(t);
        return false;
    }
    int p = r.lowest_set();
    // keep rows reduced: clear the new pivot from existing rows
    for (size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].test(p)) {
            rows_[i] ^= r;
            trackers_[i] ^= t;
        }
    }
    rows_.push_back(std::move(r));
    trackers_.push_back(std::move(t));
    pivots_.push_back(p);
    return true;
}

std::optional<Bitset> Eliminator::solve(const Bitset& target) const {
    Bitset r = target;
    Bitset t(tracker_bits_);
    for (size_t i = 0; i < rows_.size(); ++i) {
        if (r.test(pivots_[i])) {
            r ^= rows_[i];
            t ^= trackers_[i];
        }
    }
    if (!r.none()) return std::nullopt;
    return t;
}

std::vector<Bitset> independent_subset(const std::vector<Bitset>& gens, int nbits) {
    Eliminator elim(nbits, int(gens.size()));
    std::vector<Bitset> out;
    for (size_t i = 0; i < gens.size(); ++i)
        if (elim.add(gens[i], int(i))) out.push_back(gens[i]);
    return out;
}

void enumerate_span(const std::vector<Bitset>& gens, int nbits,
                    const std::function<void(const Bitset&, int)>& visit) {
    const int k = int(gens.size());
    if (k > 30) throw std::runtime_error("span too large to enumerate");
    Bitset cur(nbits);
    int pc = 0;
    visit(cur, pc);
    const uint64_t total = uint64_t(1) << k;
    for (uint64_t i = 1; i < total; ++i) {
        int bit = std::countr_zero(i);  // Gray code: toggle generator `bit`
        pc += cur.xor_count_delta(gens[size_t(bit)]);
        visit(cur, pc);
    }
}

}  // namespace plaq::f2
