#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlfbec/rng.hpp"

namespace vlfbec::gf2 {

/// Fixed-length bit vector over the binary field, packed 64 bits per word.
/// The packing is internal; callers only see positional bit access.
class Gf2Vector {
public:
    explicit Gf2Vector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    /// Bit i of the result is s[i] ('0'/'1').
    static Gf2Vector from_string(const std::string& s) {
        Gf2Vector v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("Gf2Vector: bits must be 0/1");
            v.set(i, s[i] == '1');
        }
        return v;
    }

    /// Bit i of the result is bit i of value. Requires size <= 64.
    static Gf2Vector from_uint(std::uint64_t value, std::size_t size) {
        if (size > 64) throw std::invalid_argument("Gf2Vector::from_uint: size > 64");
        Gf2Vector v(size);
        if (size > 0) v.words_[0] = value & mask_for(size);
        return v;
    }

    std::size_t size() const { return size_; }

    bool bit(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

    void set(std::size_t i, bool value) {
        const std::uint64_t m = std::uint64_t{1} << (i % 64);
        if (value)
            words_[i / 64] |= m;
        else
            words_[i / 64] &= ~m;
    }

    bool is_zero() const {
        for (std::uint64_t w : words_)
            if (w != 0) return false;
        return true;
    }

    /// Index of the highest set bit. Requires a nonzero vector.
    std::size_t top_bit() const {
        for (std::size_t wi = words_.size(); wi-- > 0;) {
            if (words_[wi] != 0) return wi * 64 + (63 - std::countl_zero(words_[wi]));
        }
        throw std::logic_error("Gf2Vector::top_bit: zero vector");
    }

    Gf2Vector& operator^=(const Gf2Vector& other) {
        if (other.size_ != size_) throw std::invalid_argument("Gf2Vector: dimension mismatch");
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
        return *this;
    }

    friend bool operator==(const Gf2Vector& a, const Gf2Vector& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

    std::uint64_t to_uint() const {
        if (size_ > 64) throw std::logic_error("Gf2Vector::to_uint: size > 64");
        return words_.empty() ? 0 : words_[0];
    }

    void fill_random(RngStream& rng) {
        for (std::uint64_t& w : words_) w = rng.next_u64();
        trim();
    }

private:
    static std::uint64_t mask_for(std::size_t bits) {
        return bits % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (bits % 64)) - 1;
    }

    void trim() {
        if (!words_.empty() && size_ % 64 != 0) words_.back() &= mask_for(size_);
    }

    friend int inner_product(const Gf2Vector&, const Gf2Vector&);

    std::size_t size_;
    std::vector<std::uint64_t> words_;
};

/// Parity of the bitwise AND of two equal-length vectors.
inline int inner_product(const Gf2Vector& u, const Gf2Vector& v) {
    if (u.size() != v.size()) throw std::invalid_argument("inner_product: dimension mismatch");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < u.words_.size(); ++i) acc ^= u.words_[i] & v.words_[i];
    return std::popcount(acc) & 1;
}

/// Uniform over the 2^k - 1 nonzero vectors, by rejection of the zero draw.
inline Gf2Vector sample_nonzero_vector(std::size_t k, RngStream& rng) {
    if (k == 0) throw std::invalid_argument("sample_nonzero_vector: k must be >= 1");
    Gf2Vector v(k);
    do {
        v.fill_random(rng);
    } while (v.is_zero());
    return v;
}

/// Incrementally maintained reduced row basis with distinct pivot positions.
/// Rank never decreases under insertion; each insert costs O(rank) word ops.
/// Rows may carry a payload bit so that a received linear system can be
/// solved by read-off once the basis is complete.
class Gf2Basis {
public:
    explicit Gf2Basis(std::size_t dimension) : dim_(dimension) {}

    std::size_t dimension() const { return dim_; }
    std::size_t rank() const { return rows_.size(); }
    bool complete() const { return rows_.size() == dim_; }

    /// Returns true iff v was outside the current span (rank grew by one).
    bool insert(const Gf2Vector& v, int payload = 0) {
        if (v.size() != dim_) throw std::invalid_argument("Gf2Basis::insert: dimension mismatch");
        Gf2Vector reduced = v;
        int carried = payload & 1;
        for (const Row& row : rows_) {
            if (reduced.bit(row.pivot)) {
                reduced ^= row.vec;
                carried ^= row.payload;
            }
        }
        if (reduced.is_zero()) return false;
        const std::size_t pivot = reduced.top_bit();
        for (Row& row : rows_) {
            if (row.vec.bit(pivot)) {
                row.vec ^= reduced;
                row.payload ^= carried;
            }
        }
        rows_.push_back(Row{reduced, pivot, carried});
        return true;
    }

    bool contains(const Gf2Vector& v) const {
        if (v.size() != dim_) throw std::invalid_argument("Gf2Basis::contains: dimension mismatch");
        Gf2Vector reduced = v;
        for (const Row& row : rows_) {
            if (reduced.bit(row.pivot)) reduced ^= row.vec;
        }
        return reduced.is_zero();
    }

    /// Solution x of the stored system <x, vec_j> = payload_j. Only available
    /// once the basis spans the whole space; the rows are then unit vectors.
    Gf2Vector solution() const {
        if (!complete()) throw std::logic_error("Gf2Basis::solution: basis not complete");
        Gf2Vector x(dim_);
        for (const Row& row : rows_) x.set(row.pivot, row.payload != 0);
        return x;
    }

private:
    struct Row {
        Gf2Vector vec;
        std::size_t pivot;
        int payload;
    };

    std::size_t dim_;
    std::vector<Row> rows_;
};

}  // namespace vlfbec::gf2
