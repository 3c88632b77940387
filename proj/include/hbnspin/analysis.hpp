#ifndef HBNSPIN_ANALYSIS_HPP
#define HBNSPIN_ANALYSIS_HPP

#include "hbnspin/dynamics.hpp"
#include "hbnspin/levmar.hpp"
#include "hbnspin/spectra.hpp"

#include <optional>
#include <vector>

namespace hbnspin::analysis {

using dynamics::NuclearDistribution;
using dynamics::TimeTrace;
using spectra::Spectrum;

// ---------------------------------------------------------------------------
// multi-Lorentzian spectrum fitting

/// Parameters of an n-peak Lorentzian comb: unit-peak Lorentzians of height
/// amplitude[k] at centers[k], all sharing one FWHM unless fwhm carries one
/// value per peak, on a constant baseline.
struct PeakSet {
    std::vector<double> centers_mhz;   // ascending
    std::vector<double> amplitudes;    // >= 0
    std::vector<double> fwhm_mhz;      // size 1 (shared) or centers.size()
    double baseline = 0;

    std::size_t size() const { return centers_mhz.size(); }
    void validate() const;  // throws std::invalid_argument
    /// Model value at one frequency.
    double evaluate(double f_mhz) const;
};

struct LorentzFitOptions {
    bool fix_centers = false;    // the paper's procedure: centers pinned once
    bool fix_fwhm = false;
    bool fix_baseline = false;
    LMOptions lm;
};

struct LorentzFitResult {
    PeakSet peaks;
    bool converged = false;
    int iterations = 0;
    double cost = 0;
    double residual_rms = 0;
};

/// Least-squares fit of the n-Lorentzian model with analytic Jacobians.
/// Throws FitFailure (carrying the last iterate) when damping cannot recover.
LorentzFitResult fit_lorentzians(const Spectrum& spec, const PeakSet& init,
                                 const LorentzFitOptions& opts = {});

/// Initial PeakSet for an ODMR fit: centers from the hyperfine comb of the
/// given parameters, amplitudes read off the spectrum at those centers.
PeakSet seed_odmr_peaks(const Spectrum& spec, const hamiltonian::SpinSystemParams& p,
                        double fwhm_guess_mhz = 0);

/// Map fitted peak amplitudes back onto m_I populations by matching each
/// center to the hyperfine comb of the given parameters.  Amplitudes are
/// clamped at zero and normalized.
NuclearDistribution peaks_to_distribution(const PeakSet& peaks,
                                          const hamiltonian::SpinSystemParams& p);

// ---------------------------------------------------------------------------
// polarization

/// P = sum_mI m_I rho_mI / (3 sum_mI rho_mI); scale invariant.  Throws
/// std::invalid_argument when every entry is zero.
double polarization(const NuclearDistribution& rho);

// ---------------------------------------------------------------------------
// damped-cosine Rabi fitting

/// a e^{-t/T} cos(2 pi f t + phi) + sum_k c_k e^{-t/tau_k} + baseline.
/// Decays are optimized as rates; when a fitted rate falls below
/// 1/(50 * span) the corresponding time constant is reported as that cap with
/// the upper-bound flag set.
struct RabiFit {
    double f_rabi_mhz = 0;
    double t2_star_us = 0;
    double amplitude = 0;
    double phase_rad = 0;
    std::vector<std::pair<double, double>> extra_decays;  // (c_k, tau_k us)
    double baseline = 0;
    double residual_rms = 0;
    bool converged = false;
    bool t2_upper_bound = false;
};

struct RabiFitOptions {
    int n_extra_decays = 1;
    LMOptions lm;
};

/// Requires at least 8 samples spanning one oscillation period of the initial
/// frequency guess.
RabiFit fit_damped_cosine(const TimeTrace& trace, const RabiFit& init,
                          const RabiFitOptions& opts = {});

// ---------------------------------------------------------------------------
// linear regression

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

/// Ordinary least squares; with zero_intercept the intercept is pinned to 0.
/// Throws std::invalid_argument for fewer than 2 points or degenerate x.
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                     bool zero_intercept = false);

}  // namespace hbnspin::analysis

#endif
