#ifndef HBNSPIN_EIGENSYSTEM_HPP
#define HBNSPIN_EIGENSYSTEM_HPP

#include "hbnspin/operators.hpp"

#include <vector>

namespace hbnspin::spectra {

/// Dominant (m_s, m_I) assignment of one eigenstate.  A state is "mixed" when
/// no electron branch carries more than half of its weight; mixed states take
/// part in every branch with their actual weights.
struct StateLabel {
    int ms = 0;             // dominant electron projection (+1, 0, -1)
    int mi = 0;             // dominant total nuclear projection (-3..+3)
    double ms_weight = 0;   // weight on the dominant m_s subspace, in [0,1]
    double mi_weight = 0;   // weight on the dominant m_I subspace, in [0,1]
    bool mixed = false;     // true when ms_weight <= 0.5
};

/// Sorted eigendecomposition of a Hermitian operator with branch labels.
struct EigenSystem {
    std::vector<double> values;    // ascending, MHz
    spinops::Matrix vectors;       // orthonormal columns, same order
    std::vector<StateLabel> labels;

    int dim() const { return static_cast<int>(values.size()); }
    /// Weight of eigenstate k on the electron m_s subspace (+1, 0, -1).
    double branch_weight(int k, int ms) const;
    /// Indices of eigenstates whose dominant m_s equals ms.
    std::vector<int> branch_indices(int ms) const;
};

/// Deterministic Hermitian eigendecomposition: ascending eigenvalues, each
/// eigenvector's phase fixed so its first component above 1e-12 of the column
/// maximum is real positive.  Throws std::invalid_argument for non-Hermitian
/// input.
EigenSystem eigh(const spinops::Operator& h);

}  // namespace hbnspin::spectra

#endif
