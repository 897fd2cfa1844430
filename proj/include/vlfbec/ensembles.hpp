#pragma once

namespace vlfbec {

/// Codebook column ensembles for the stop-feedback schemes.
///  - iid_bernoulli_half: every codebook entry iid Bernoulli(0.5)
///  - balanced_columns:   columns uniform over M-bit vectors with ceil(M/2) zeros
///  - linear_fountain:    generator columns uniform over nonzero vectors of F2^k,
///                        M = 2^k
enum class Ensemble { iid_bernoulli_half, balanced_columns, linear_fountain };

inline const char* ensemble_name(Ensemble e) {
    switch (e) {
        case Ensemble::iid_bernoulli_half: return "iid-bernoulli-half";
        case Ensemble::balanced_columns: return "balanced-columns";
        case Ensemble::linear_fountain: return "linear-fountain";
    }
    return "?";
}

}  // namespace vlfbec
