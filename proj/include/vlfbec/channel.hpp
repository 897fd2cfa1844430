#pragma once

#include <cstdint>
#include <stdexcept>

#include "vlfbec/rng.hpp"

namespace vlfbec::channel {

/// Channel output alphabet {0, e, 1}.
enum class Symbol : std::uint8_t { zero, one, erasure };

inline Symbol bit_symbol(int b) { return (b & 1) ? Symbol::one : Symbol::zero; }

/// Bit value of a non-erased symbol.
inline int symbol_bit(Symbol s) {
    if (s == Symbol::erasure) throw std::invalid_argument("symbol_bit: erasure has no bit value");
    return s == Symbol::one ? 1 : 0;
}

/// Binary erasure channel with erasure probability delta in [0, 1).
class ChannelSpec {
public:
    explicit ChannelSpec(double delta) : delta_(delta) {
        if (!(delta >= 0.0 && delta < 1.0))
            throw std::invalid_argument("ChannelSpec: erasure probability must be in [0, 1)");
    }

    double erasure_probability() const { return delta_; }

private:
    double delta_;
};

/// One BEC use: the input bit survives with probability 1 - delta and is
/// never flipped.
inline Symbol transmit(const ChannelSpec& spec, int bit, RngStream& rng) {
    if (rng.uniform() < spec.erasure_probability()) return Symbol::erasure;
    return bit_symbol(bit);
}

/// Draw from the capacity-achieving output distribution of the BEC:
/// P(0) = P(1) = (1 - delta)/2, P(e) = delta. Independent of any input.
inline Symbol q_output(const ChannelSpec& spec, RngStream& rng) {
    if (rng.uniform() < spec.erasure_probability()) return Symbol::erasure;
    return rng.bit() ? Symbol::one : Symbol::zero;
}

}  // namespace vlfbec::channel
