#pragma once

#include <cstdint>
#include <vector>

namespace ecolens::novelty {

// Membership set for unordered pairs of interned library ids. A Bloom-style
// bit filter sits in front of an exact open-addressed hash set: the filter
// only short-circuits definite misses, so membership answers are exact.
class PairSeenSet {
public:
    explicit PairSeenSet(std::size_t expected_pairs = 64) {
        std::size_t cap = 16;
        while (cap < expected_pairs * 2) cap <<= 1;
        slots_.assign(cap, 0);
        rebuild_bloom();
    }

    // Inserts the unordered pair {x, y}; returns true when it was new.
    bool insert(std::uint32_t x, std::uint32_t y) {
        if (x == y) return false;
        std::uint32_t a = x < y ? x : y;
        std::uint32_t b = x < y ? y : x;
        // b >= 1, so the key is never 0 (the empty-slot sentinel)
        std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
        std::uint64_t h = mix(key);
        std::size_t h1 = h & bloom_mask_;
        std::size_t h2 = (h >> 32) & bloom_mask_;
        if (bloom_get(h1) && bloom_get(h2)) {
            if (contains_exact(key, h)) return false;
        }
        insert_exact(key, h);
        bloom_set(h1);
        bloom_set(h2);
        ++count_;
        if (count_ * 2 > slots_.size()) grow();
        return true;
    }

    std::size_t size() const { return count_; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    bool bloom_get(std::size_t bit) const {
        return (bloom_[bit >> 6] >> (bit & 63)) & 1;
    }
    void bloom_set(std::size_t bit) { bloom_[bit >> 6] |= 1ULL << (bit & 63); }

    bool contains_exact(std::uint64_t key, std::uint64_t h) const {
        std::size_t mask = slots_.size() - 1;
        for (std::size_t i = h & mask;; i = (i + 1) & mask) {
            if (slots_[i] == 0) return false;
            if (slots_[i] == key) return true;
        }
    }
    void insert_exact(std::uint64_t key, std::uint64_t h) {
        std::size_t mask = slots_.size() - 1;
        std::size_t i = h & mask;
        while (slots_[i] != 0) i = (i + 1) & mask;
        slots_[i] = key;
    }

    void rebuild_bloom() {
        // ~16 filter bits per slot keeps false positives rare, so nearly
        // every novel pair skips the exact probe entirely
        std::size_t bits = slots_.size() * 16;
        bloom_.assign(bits >> 6, 0);
        bloom_mask_ = bits - 1;
        for (std::uint64_t key : slots_) {
            if (key == 0) continue;
            std::uint64_t h = mix(key);
            bloom_set(h & bloom_mask_);
            bloom_set((h >> 32) & bloom_mask_);
        }
    }

    void grow() {
        std::vector<std::uint64_t> old;
        old.swap(slots_);
        slots_.assign(old.size() * 2, 0);
        for (std::uint64_t key : old) {
            if (key != 0) insert_exact(key, mix(key));
        }
        rebuild_bloom();
    }

    std::vector<std::uint64_t> bloom_;
    std::size_t bloom_mask_ = 0;
    std::vector<std::uint64_t> slots_;
    std::size_t count_ = 0;
};

} // namespace ecolens::novelty
