#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "vlfbec/rational.hpp"

namespace vlfbec::huffman {

/// Optimal prefix-free code for M equiprobable messages. All codeword lengths
/// are floor(log2 M) or floor(log2 M) + 1, with exactly 2^(floor(log2 M)+1) - M
/// codewords of the shorter length; Kraft's inequality holds with equality.
struct PrefixCode {
    std::uint64_t message_count = 0;
    std::vector<std::uint8_t> lengths;    // per message
    std::vector<std::uint32_t> codewords; // MSB-first values, lengths[i] bits
    std::uint8_t short_length = 0;        // floor(log2 M)
    std::uint64_t short_count = 0;        // messages with the shorter length
};

inline unsigned floor_log2_u64(std::uint64_t x) { return static_cast<unsigned>(std::bit_width(x)) - 1; }

/// Canonical construction: lengths follow directly from M, shorter codewords
/// go to the lower message indices, bit patterns are sequential.
inline PrefixCode equiprobable_code(std::uint64_t M) {
    if (M < 2) throw std::invalid_argument("equiprobable_code: M must be >= 2");
    const unsigned f = floor_log2_u64(M);
    const std::uint64_t shorter = (std::uint64_t{1} << (f + 1)) - M;
    PrefixCode code;
    code.message_count = M;
    code.short_length = static_cast<std::uint8_t>(f);
    code.short_count = shorter;
    code.lengths.resize(M);
    code.codewords.resize(M);
    for (std::uint64_t w = 0; w < M; ++w) {
        if (w < shorter) {
            code.lengths[w] = static_cast<std::uint8_t>(f);
            code.codewords[w] = static_cast<std::uint32_t>(w);
        } else {
            code.lengths[w] = static_cast<std::uint8_t>(f + 1);
            code.codewords[w] = static_cast<std::uint32_t>(w + shorter);
        }
    }
    return code;
}

/// Exact average codeword length, sum(lengths)/M.
inline Rational average_length(const PrefixCode& code) {
    unsigned long total = 0;
    for (std::uint8_t len : code.lengths) total += len;
    Rational r(total, static_cast<unsigned long>(code.message_count));
    r.canonicalize();
    return r;
}

/// Kraft sum as an exact rational (1 for every valid code here).
inline Rational kraft_sum(const PrefixCode& code) {
    Rational sum = 0;
    for (std::uint8_t len : code.lengths) sum += pow2_rational(-static_cast<long>(len));
    return sum;
}

/// (value, length) of message w, MSB first.
inline std::pair<std::uint32_t, unsigned> encode(const PrefixCode& code, std::uint64_t w) {
    if (w >= code.message_count) throw std::invalid_argument("encode: message out of range");
    return {code.codewords[w], code.lengths[w]};
}

/// Feed bits MSB first; yields the decoded message as soon as the consumed
/// prefix matches a complete codeword.
class PrefixDecoder {
public:
    explicit PrefixDecoder(const PrefixCode& code) : code_(&code) {}

    void reset() {
        value_ = 0;
        consumed_ = 0;
    }

    std::optional<std::uint64_t> push_bit(int b) {
        value_ = (value_ << 1) | static_cast<std::uint32_t>(b & 1);
        ++consumed_;
        if (consumed_ == code_->short_length && value_ < code_->short_count) {
            return value_;
        }
        if (consumed_ == code_->short_length + 1u) {
            return value_ - code_->short_count;
        }
        return std::nullopt;
    }

private:
    const PrefixCode* code_;
    std::uint32_t value_ = 0;
    unsigned consumed_ = 0;
};

/// Decode one message from the front of `bits`; returns the message and the
/// number of bits consumed.
inline std::pair<std::uint64_t, unsigned> decode(const PrefixCode& code, const std::vector<int>& bits) {
    PrefixDecoder dec(code);
    unsigned used = 0;
    for (int b : bits) {
        ++used;
        if (auto w = dec.push_bit(b)) return {*w, used};
    }
    throw std::invalid_argument("decode: bit string ends inside a codeword");
}

/// Independent oracle: classic greedy two-smallest merge on uniform weights.
/// The resulting length multiset must match the canonical construction.
inline PrefixCode reference_huffman(std::uint64_t M) {
    if (M < 2) throw std::invalid_argument("reference_huffman: M must be >= 2");
    struct Node {
        std::uint64_t weight;
        std::int64_t left = -1, right = -1;
    };
    std::vector<Node> nodes;
    nodes.reserve(2 * M);
    using Entry = std::pair<std::uint64_t, std::size_t>;  // (weight, node index)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (std::uint64_t w = 0; w < M; ++w) {
        nodes.push_back(Node{1});
        heap.emplace(1, nodes.size() - 1);
    }
    while (heap.size() > 1) {
        auto [wa, a] = heap.top();
        heap.pop();
        auto [wb, b] = heap.top();
        heap.pop();
        nodes.push_back(Node{wa + wb, static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)});
        heap.emplace(wa + wb, nodes.size() - 1);
    }

    std::vector<std::uint8_t> lengths;
    lengths.reserve(M);
    std::vector<std::pair<std::size_t, std::uint8_t>> stack{{heap.top().second, 0}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& node = nodes[idx];
        if (node.left < 0) {
            lengths.push_back(depth);
        } else {
            stack.emplace_back(static_cast<std::size_t>(node.left), static_cast<std::uint8_t>(depth + 1));
            stack.emplace_back(static_cast<std::size_t>(node.right), static_cast<std::uint8_t>(depth + 1));
        }
    }
    std::sort(lengths.begin(), lengths.end());

    PrefixCode code;
    code.message_count = M;
    code.lengths = std::move(lengths);
    code.short_length = code.lengths.front();
    code.short_count = static_cast<std::uint64_t>(
        std::count(code.lengths.begin(), code.lengths.end(), code.lengths.front()));
    // Canonical sequential assignment from the sorted lengths.
    code.codewords.resize(M);
    std::uint32_t next = 0;
    std::uint8_t prev_len = code.lengths.front();
    for (std::uint64_t w = 0; w < M; ++w) {
        next <<= (code.lengths[w] - prev_len);
        prev_len = code.lengths[w];
        code.codewords[w] = next++;
    }
    return code;
}

}  // namespace vlfbec::huffman
