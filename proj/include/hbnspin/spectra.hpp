#ifndef HBNSPIN_SPECTRA_HPP
#define HBNSPIN_SPECTRA_HPP

#include "hbnspin/eigensystem.hpp"
#include "hbnspin/hamiltonian.hpp"

#include <array>
#include <vector>

namespace hbnspin::spectra {

using hamiltonian::Manifold;
using hamiltonian::SpinSystemParams;

// ---------------------------------------------------------------------------
// level diagrams and anti-crossing search

struct LevelSweep {
    std::vector<double> b_mt;                 // field points, input order
    std::vector<std::vector<double>> values;  // one row of 81 ascending MHz per field
};

/// One eigh per field point; rows ordered as b_mt.  Parallelizes over field
/// points up to the HBN_SPINLAB_THREADS cap; output is independent of the
/// thread count.
LevelSweep level_sweep(const SpinSystemParams& base, const std::vector<double>& b_mt);
LevelSweep level_sweep(Manifold m, const std::vector<double>& b_mt);

/// Field minimizing the separation between the m_s=0 and m_s=-1 electron
/// branches, each branch measured by the weight-averaged energy of its
/// eigenstates.  Coarse scan over [1, 300] mT followed by golden-section
/// refinement to 0.01 mT.  Throws std::runtime_error when no interior
/// minimum brackets.
double find_lac(const SpinSystemParams& base);
double find_lac(Manifold m);

// ---------------------------------------------------------------------------
// transition catalogs

struct TransitionLine {
    double freq_mhz = 0;   // >= 0
    double strength = 0;   // |<f|V|i>|^2, MHz^2 per unit mT^2
    double weight = 0;     // population of the initial state, in [0,1]
    int ms_from = 0;
    int ms_to = 0;
    int state_i = -1;      // eigenstate indices into the source EigenSystem
    int state_f = -1;
};

struct FrequencyWindow {
    double min_mhz = 0;
    double max_mhz = 0;
};

inline constexpr double default_strength_floor_rel = 1e-6;

/// All pairs (i, f) with E_f > E_i, frequency inside the window and strength
/// above floor_rel of the windowed maximum; weight = populations[i].
/// Lines are sorted by frequency.
std::vector<TransitionLine> transition_catalog(
    const EigenSystem& es, const spinops::Operator& v, FrequencyWindow window,
    const std::vector<double>& populations,
    double floor_rel = default_strength_floor_rel);

// ---------------------------------------------------------------------------
// synthetic spectra

struct GridSpec {
    double start = 0;
    double stop = 0;
    double step = 0;
    int n() const;
    std::vector<double> points() const;
};

enum class LineShape { Lorentzian, Gaussian };

/// Sampled (frequency, intensity) trace; dips are stored as positive
/// intensity.  The grid is uniform and strictly increasing.
struct Spectrum {
    std::vector<double> freqs_mhz;
    std::vector<double> intensity;
    double fwhm_mhz = 0;
};

/// Relative populations of the seven total nuclear projections m_I = -3..+3.
using MiPopulations = std::array<double, 7>;

/// Unpolarized distribution proportional to the multiplicities 1,3,6,7,6,3,1.
MiPopulations multiplicity_populations();

/// m_s=0 -> m_s=-1 transition frequency of the hyperfine comb for each total
/// nuclear projection, from the Hamiltonian diagonal averaged over the m_I
/// sector (equals D - gamma_e B - mean(A_zz) m_I - gamma_n B m_I terms for the
/// default axial tensors).  Indexed by m_I + 3.
std::array<double, 7> odmr_line_centers(const SpinSystemParams& p);

struct OdmrLine {
    int m_i = 0;
    double center_mhz = 0;
    double amplitude = 0;
};

/// The seven-line hyperfine comb with amplitudes equal to rho, sorted by
/// center.  rho must be nonnegative and sum to 1 within 1e-9.
std::array<OdmrLine, 7> odmr_lines(const SpinSystemParams& p, const MiPopulations& rho);

/// Lorentzian-broadened comb; a line carrying the whole population peaks at 1.
Spectrum odmr_spectrum(const SpinSystemParams& p, const MiPopulations& rho,
                       double fwhm_mhz, const GridSpec& grid,
                       LineShape shape = LineShape::Lorentzian);

struct OdnmrOptions {
    MiPopulations rho = multiplicity_populations();
    double strength_floor_rel = default_strength_floor_rel;
    LineShape shape = LineShape::Lorentzian;
};

/// Nuclear-transition spectrum of one electron branch (m_s = 0 or -1).  With
/// mw_pi_applied the pumped m_I populations sit on the m_s=-1 branch,
/// otherwise on m_s=0 (the "Reference" trace); only transitions between
/// eigenstates of the selected branch are emitted.
Spectrum odnmr_spectrum(const SpinSystemParams& p, int branch_ms, double fwhm_mhz,
                        const GridSpec& grid, bool mw_pi_applied,
                        const OdnmrOptions& opts = {});

/// Intensity-weighted mean frequency of a spectrum restricted to a window.
double band_centroid(const Spectrum& s, double lo_mhz, double hi_mhz);
/// Trapezoid-free plain sum of intensity over a window (grid is uniform).
double band_intensity(const Spectrum& s, double lo_mhz, double hi_mhz);

// ---------------------------------------------------------------------------
// coupling constants

/// Electron-mediated nuclear-nuclear coupling A_tran^2 / |D_GS - gamma_e B|
/// in MHz.  Valid away from the GSLAC; throws std::domain_error when
/// |D_GS - gamma_e B| <= 1 MHz.
double c_nn(double b_mt);

/// Convention for evaluating the direct nuclear dipole-dipole constant
/// mu0 gamma_n^2 hbar / (2 r^3): gamma_n in cyclic units (Hz/T) with the
/// result already in Hz, or gamma_n in angular units (rad/s/T) with the
/// result converted back to Hz.
enum class DipoleConvention { GammaCyclic, GammaAngular };

/// Direct nuclear dipole-dipole coupling in Hz for separation r_nn (nm).
double d_nn(double r_nn_nm, DipoleConvention convention = DipoleConvention::GammaCyclic);

}  // namespace hbnspin::spectra

#endif
