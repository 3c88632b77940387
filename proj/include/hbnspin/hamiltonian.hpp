#ifndef HBNSPIN_HAMILTONIAN_HPP
#define HBNSPIN_HAMILTONIAN_HPP

#include "hbnspin/operators.hpp"
#include "hbnspin/params.hpp"

namespace hbnspin::hamiltonian {

/// Full 81x81 spin Hamiltonian H/h in MHz:
///   D [Sz^2 - 2/3] + sum_j S.A_j.I_j + gamma_e B0 Sz
///   - gamma_n B0 sum_j I_zj + sum_j Q_j [I_zj^2 - 2/3].
/// Hermitian and traceless.
spinops::Operator build_hamiltonian(const SpinSystemParams& p);

/// Transverse hyperfine part alone, sum_j [A_xx Sx Ixj + A_yy Sy Iyj + the
/// off-diagonal tensor terms]; this is the operator that hybridizes
/// |m_s=0, m_I> with |m_s=-1, m_I+1> near a level anti-crossing.
spinops::Operator transverse_hyperfine(const SpinSystemParams& p);

enum class DriveKind { RF_inplane, MW };

/// Coupling operator per unit in-plane drive field B1 (mT):
///   V/B1 = gamma_e Sx + gamma_n sum_j I_xj.
/// RF and MW drives share this matrix; the kind tag only selects frequency
/// windows downstream.
spinops::Operator drive_operator(const SpinSystemParams& p,
                                 DriveKind kind = DriveKind::RF_inplane);

}  // namespace hbnspin::hamiltonian

#endif
