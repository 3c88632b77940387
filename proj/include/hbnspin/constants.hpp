#ifndef HBNSPIN_CONSTANTS_HPP
#define HBNSPIN_CONSTANTS_HPP

// Physical constants for the V_B- defect in hexagonal boron nitride and its
// three nearest 14N nuclei.  Energies are frequencies in MHz (H/h), magnetic
// fields in mT, so gyromagnetic ratios carry MHz/mT (= GHz/T).

namespace hbnspin::constants {

// zero-field splitting of the spin-1 electron, ground / excited orbital state
inline constexpr double d_gs_mhz = 3450.0;
inline constexpr double d_es_mhz = 2100.0;

// gyromagnetic ratios
inline constexpr double gamma_e_mhz_per_mt = 28.0;      // electron, 28 GHz/T
inline constexpr double gamma_n_mhz_per_mt = 3.076e-3;  // 14N, 3.076 MHz/T

// hyperfine tensor of each nearest 14N, axial approximation
inline constexpr double a_zz_mhz = 47.0;
inline constexpr double a_tran_mhz = 68.0;  // (A_xx + A_yy)/2

// geometry: nearest N-N separation in the hBN lattice (in-plane lattice constant)
inline constexpr double r_nn_hbn_nm = 0.2504;

// SI values used only by the nuclear dipole-dipole estimate
inline constexpr double mu0_si = 4.0e-7 * 3.14159265358979323846;  // T m / A
inline constexpr double hbar_si = 1.054571817e-34;                 // J s

inline constexpr double gamma_ratio() {
    return gamma_e_mhz_per_mt / gamma_n_mhz_per_mt;
}

}  // namespace hbnspin::constants

#endif
