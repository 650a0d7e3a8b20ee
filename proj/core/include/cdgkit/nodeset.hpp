#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace cdgkit {

// Set of node indices backed by 64-bit words. Desk-scale graphs fit in a
// single word (the fast path); wider universes spill into extra words.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(int universe) : words_((universe + 63) / 64, 0) {
        if (words_.empty()) words_.resize(1, 0);
    }

    static NodeSet of(int universe, std::initializer_list<int> xs) {
        NodeSet s(universe);
        for (int x : xs) s.add(x);
        return s;
    }

    void add(int i) {
        grow(i / 64 + 1);
        words_[i / 64] |= (std::uint64_t{1} << (i % 64));
    }
    void remove(int i) {
        if (i / 64 < (int)words_.size()) words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }
    bool contains(int i) const {
        return i / 64 < (int)words_.size() && (words_[i / 64] >> (i % 64)) & 1;
    }

    int count() const {
        int c = 0;
        for (auto w : words_) c += __builtin_popcountll(w);
        return c;
    }
    bool empty() const {
        for (auto w : words_) if (w) return false;
        return true;
    }

    NodeSet& operator|=(const NodeSet& o) {
        grow(o.words_.size());
        for (size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    NodeSet& operator&=(const NodeSet& o) {
        for (size_t i = 0; i < words_.size(); ++i)
            words_[i] &= (i < o.words_.size() ? o.words_[i] : 0);
        return *this;
    }
    NodeSet operator|(const NodeSet& o) const { NodeSet r = *this; r |= o; return r; }
    NodeSet operator&(const NodeSet& o) const { NodeSet r = *this; r &= o; return r; }
    NodeSet minus(const NodeSet& o) const {
        NodeSet r = *this;
        for (size_t i = 0; i < r.words_.size() && i < o.words_.size(); ++i)
            r.words_[i] &= ~o.words_[i];
        return r;
    }

    bool is_subset_of(const NodeSet& o) const {
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~(i < o.words_.size() ? o.words_[i] : 0)) return false;
        return true;
    }
    bool intersects(const NodeSet& o) const {
        size_t m = words_.size() < o.words_.size() ? words_.size() : o.words_.size();
        for (size_t i = 0; i < m; ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    bool operator==(const NodeSet& o) const {
        size_t m = words_.size() > o.words_.size() ? words_.size() : o.words_.size();
        for (size_t i = 0; i < m; ++i)
            if (word(i) != o.word(i)) return false;
        return true;
    }
    bool operator!=(const NodeSet& o) const { return !(*this == o); }
    // Lexicographic on the bit pattern, low indices most significant last;
    // gives a deterministic total order for output.
    bool operator<(const NodeSet& o) const {
        size_t m = words_.size() > o.words_.size() ? words_.size() : o.words_.size();
        for (size_t i = m; i-- > 0;) {
            if (word(i) != o.word(i)) return word(i) < o.word(i);
        }
        return false;
    }

    std::vector<int> elements() const {
        std::vector<int> out;
        for (size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = __builtin_ctzll(w);
                out.push_back((int)(i * 64 + b));
                w &= w - 1;
            }
        }
        return out;
    }

    template <typename F>
    void for_each(F f) const {
        for (size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = __builtin_ctzll(w);
                f((int)(i * 64 + b));
                w &= w - 1;
            }
        }
    }

    int first() const {
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return (int)(i * 64 + __builtin_ctzll(words_[i]));
        return -1;
    }

private:
    std::uint64_t word(size_t i) const { return i < words_.size() ? words_[i] : 0; }
    void grow(size_t nwords) { if (words_.size() < nwords) words_.resize(nwords, 0); }
    std::vector<std::uint64_t> words_{0};
};

} // namespace cdgkit
