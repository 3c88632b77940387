#ifndef HBNSPIN_DYNAMICS_HPP
#define HBNSPIN_DYNAMICS_HPP

#include "hbnspin/eigensystem.hpp"
#include "hbnspin/spectra.hpp"

#include <array>
#include <vector>

namespace hbnspin::dynamics {

using hamiltonian::SpinSystemParams;
using spectra::EigenSystem;

// ---------------------------------------------------------------------------
// optical nuclear-spin pumping (phenomenological population chain)

/// Populations of the seven m_I = -3..+3 manifolds; nonnegative, normalized.
struct NuclearDistribution {
    std::array<double, 7> rho{};

    double& operator[](int m_i) { return rho[static_cast<std::size_t>(m_i + 3)]; }
    double operator[](int m_i) const { return rho[static_cast<std::size_t>(m_i + 3)]; }
    void validate() const;       // throws std::invalid_argument
    void normalize();
    static NuclearDistribution multiplicity();
    static NuclearDistribution delta(int m_i);
};

struct PumpParams {
    double pump_rate_per_s = 0;    // optical cycles per second (laser power proxy)
    double depol_rate_per_s = 0;   // nuclear depolarization events per second
    SpinSystemParams es_params;    // ES manifold, mixing near the ESLAC
    SpinSystemParams gs_params;    // GS manifold, mixing near the GSLAC
    long cycles_cap = 200000;

    void validate() const;
};

/// Per-cycle probability that optical pumping moves nuclear weight from m_I to
/// m_I+1 via the transverse-hyperfine hybridization of |0,m_I> with
/// |-1,m_I+1>:  p = A_eff^2 / (A_eff^2 + Delta^2), with Delta the gap between
/// the weight-averaged energies of the two sectors in the eigensystem and
/// A_eff the rms transverse-hyperfine coupling between the product-basis
/// sectors.  m_I = +3 has no partner and returns 0.
double flip_probability(const SpinSystemParams& manifold_params, int m_i);

/// flip_probability for m_I = -3..+2 from a single diagonalization.
std::array<double, 6> flip_probabilities(const SpinSystemParams& manifold_params);

struct PumpResult {
    NuclearDistribution rho;
    double polarization = 0;   // sum m_I rho / 3, in [-1, 1]
    bool converged = false;
    long cycles = 0;
};

/// Iterates the discrete pumping chain to its fixed point: each optical cycle
/// moves weight m_I -> m_I+1 with the per-manifold flip probabilities (ES and
/// GS mixing combined as independent chances per cycle), then relaxes toward
/// the multiplicity distribution by depol_rate/pump_rate.  Stops when the L1
/// change drops below 1e-10 or at cycles_cap (flagged, not silent).
PumpResult pump_steady_state(const PumpParams& p);

// ---------------------------------------------------------------------------
// time-domain evolution under an oscillating drive

struct TimeTrace {
    std::vector<double> t_us;
    std::vector<double> population;
};

struct EvolveOptions {
    double phase_rad = 0;        // drive phase: b1 V cos(2 pi f t + phase)
    double steps_per_scale = 50; // step <= 1 / (steps_per_scale * max(f, |H|))
    int target_state = -1;       // eigenstate whose population is recorded;
                                 // -1 means the initial state itself
};

/// Piecewise-constant unitary propagation of an initial eigenstate of H under
/// H + b1 V cos(2 pi f t + phase).  Step propagators are exact exponentials,
/// so the norm is conserved to machine precision.  Output times snap to the
/// internal step grid (at most half a checkpoint stride away).
TimeTrace rabi_evolve(const SpinSystemParams& p, double drive_freq_mhz, double b1_mt,
                      const std::vector<double>& times_us, int initial_state,
                      const EvolveOptions& opts = {});

/// Same propagation returning the full state vector at each requested time;
/// used for norm and reversibility checks.
std::vector<Eigen::VectorXcd> propagate_states(const SpinSystemParams& p,
                                               double drive_freq_mhz, double b1_mt,
                                               const std::vector<double>& times_us,
                                               const Eigen::VectorXcd& psi0_eigenbasis,
                                               const EvolveOptions& opts = {});

// ---------------------------------------------------------------------------
// hyperfine enhancement of the nuclear Rabi frequency

/// Ratio of the driven matrix element |<f|gamma_e Sx + gamma_n sum I_x|i>| to
/// the bare nuclear one gamma_n |<f0|sum I_x|i0>|, where |i0>, |f0> are the
/// normalized projections of the eigenstates onto their dominant (m_s, m_I)
/// product sectors (the A=0 counterparts).  Both states must sit in the same
/// electron branch; throws std::domain_error when no bare counterpart exists.
double hyperfine_enhancement(const SpinSystemParams& p, const EigenSystem& es,
                             int state_i, int state_f);
double hyperfine_enhancement(const SpinSystemParams& p, int state_i, int state_f);

/// First-order estimate (gamma_e/gamma_n) * A_tran / (D - gamma_e B).
double enhancement_perturbative(const SpinSystemParams& p);

}  // namespace hbnspin::dynamics

#endif
