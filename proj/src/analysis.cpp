#include "hbnspin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hbnspin::analysis {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double two_pi = 2.0 * 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// PeakSet

void PeakSet::validate() const {
    const std::size_t n = centers_mhz.size();
    if (n == 0) throw std::invalid_argument("PeakSet: no peaks");
    if (amplitudes.size() != n) throw std::invalid_argument("PeakSet: amplitudes size mismatch");
    if (fwhm_mhz.size() != 1 && fwhm_mhz.size() != n)
        throw std::invalid_argument("PeakSet: fwhm must be shared or per-peak");
    for (double a : amplitudes)
        if (!(a >= 0)) throw std::invalid_argument("PeakSet: amplitudes must be >= 0");
    for (double w : fwhm_mhz)
        if (!(w > 0)) throw std::invalid_argument("PeakSet: fwhm must be > 0");
    for (std::size_t k = 1; k < n; ++k)
        if (centers_mhz[k] < centers_mhz[k - 1])
            throw std::invalid_argument("PeakSet: centers must be ascending");
}

double PeakSet::evaluate(double f) const {
    double y = baseline;
    for (std::size_t k = 0; k < size(); ++k) {
        const double w = 0.5 * (fwhm_mhz.size() == 1 ? fwhm_mhz[0] : fwhm_mhz[k]);
        const double d = f - centers_mhz[k];
        y += amplitudes[k] * w * w / (d * d + w * w);
    }
    return y;
}

// ---------------------------------------------------------------------------
// Lorentzian comb fit

namespace {

struct LorentzPacking {
    std::size_t n_peaks = 0;
    bool shared_fwhm = true;
    bool fit_centers = true, fit_fwhm = true, fit_baseline = true;
    // parameter order: amplitudes, [centers], [fwhm], [baseline]
    int n_params() const {
        int n = static_cast<int>(n_peaks);
        if (fit_centers) n += static_cast<int>(n_peaks);
        if (fit_fwhm) n += shared_fwhm ? 1 : static_cast<int>(n_peaks);
        if (fit_baseline) n += 1;
        return n;
    }
    VectorXd pack(const PeakSet& p) const {
        VectorXd v(n_params());
        int at = 0;
        for (std::size_t k = 0; k < n_peaks; ++k) v(at++) = p.amplitudes[k];
        if (fit_centers)
            for (std::size_t k = 0; k < n_peaks; ++k) v(at++) = p.centers_mhz[k];
        if (fit_fwhm)
            for (double w : p.fwhm_mhz) v(at++) = w;
        if (fit_baseline) v(at++) = p.baseline;
        return v;
    }
    void unpack(const VectorXd& v, PeakSet& p) const {
        int at = 0;
        for (std::size_t k = 0; k < n_peaks; ++k) p.amplitudes[k] = v(at++);
        if (fit_centers)
            for (std::size_t k = 0; k < n_peaks; ++k) p.centers_mhz[k] = v(at++);
        if (fit_fwhm)
            for (double& w : p.fwhm_mhz) w = v(at++);
        if (fit_baseline) p.baseline = v(at++);
    }
};

}  // namespace

LorentzFitResult fit_lorentzians(const Spectrum& spec, const PeakSet& init,
                                 const LorentzFitOptions& opts) {
    if (spec.freqs_mhz.empty())
        throw std::invalid_argument("fit_lorentzians: empty spectrum");
    if (spec.freqs_mhz.size() != spec.intensity.size())
        throw std::invalid_argument("fit_lorentzians: spectrum size mismatch");
    init.validate();

    LorentzPacking pk;
    pk.n_peaks = init.size();
    pk.shared_fwhm = init.fwhm_mhz.size() == 1;
    pk.fit_centers = !opts.fix_centers;
    pk.fit_fwhm = !opts.fix_fwhm;
    pk.fit_baseline = !opts.fix_baseline;

    PeakSet work = init;
    const std::size_t m = spec.freqs_mhz.size();
    auto residual = [&](const VectorXd& params, VectorXd& r, MatrixXd* jac) {
        pk.unpack(params, work);
        r.resize(static_cast<long>(m));
        if (jac) jac->setZero(static_cast<long>(m), params.size());
        for (std::size_t i = 0; i < m; ++i) {
            const double f = spec.freqs_mhz[i];
            double y = work.baseline;
            for (std::size_t k = 0; k < pk.n_peaks; ++k) {
                const double w = 0.5 * (pk.shared_fwhm ? work.fwhm_mhz[0] : work.fwhm_mhz[k]);
                const double d = f - work.centers_mhz[k];
                const double den = d * d + w * w;
                const double shape = w * w / den;
                y += work.amplitudes[k] * shape;
                if (!jac) continue;
                int at = 0;
                (*jac)(static_cast<long>(i), at + static_cast<int>(k)) = shape;
                at += static_cast<int>(pk.n_peaks);
                if (pk.fit_centers) {
                    (*jac)(static_cast<long>(i), at + static_cast<int>(k)) =
                        work.amplitudes[k] * 2.0 * w * w * d / (den * den);
                    at += static_cast<int>(pk.n_peaks);
                }
                if (pk.fit_fwhm) {
                    const double dfwhm = work.amplitudes[k] * w * d * d / (den * den);
                    (*jac)(static_cast<long>(i),
                           at + (pk.shared_fwhm ? 0 : static_cast<int>(k))) += dfwhm;
                    at += pk.shared_fwhm ? 1 : static_cast<int>(pk.n_peaks);
                }
                if (pk.fit_baseline && k == 0)
                    (*jac)(static_cast<long>(i), params.size() - 1) = 1.0;
            }
            r(static_cast<long>(i)) = y - spec.intensity[i];
        }
    };

    const LMResult lm = levenberg_marquardt(residual, pk.pack(init), opts.lm);

    LorentzFitResult out;
    out.peaks = init;
    pk.unpack(lm.params, out.peaks);
    out.converged = lm.converged;
    out.iterations = lm.iterations;
    out.cost = lm.cost;
    out.residual_rms = std::sqrt(lm.cost / static_cast<double>(m));
    return out;
}

PeakSet seed_odmr_peaks(const Spectrum& spec, const hamiltonian::SpinSystemParams& p,
                        double fwhm_guess_mhz) {
    const auto lines = spectra::odmr_lines(p, spectra::multiplicity_populations());
    PeakSet seed;
    const double base = *std::min_element(spec.intensity.begin(), spec.intensity.end());
    for (const auto& l : lines) seed.centers_mhz.push_back(l.center_mhz);
    double spacing = seed.centers_mhz.size() > 1
                         ? seed.centers_mhz[1] - seed.centers_mhz[0]
                         : 10.0;
    seed.fwhm_mhz = {fwhm_guess_mhz > 0 ? fwhm_guess_mhz : spacing / 3.0};
    seed.baseline = base;
    for (double c : seed.centers_mhz) {
        // nearest grid sample
        double best = 0, bestd = 1e300;
        for (std::size_t i = 0; i < spec.freqs_mhz.size(); ++i) {
            const double d = std::abs(spec.freqs_mhz[i] - c);
            if (d < bestd) { bestd = d; best = spec.intensity[i]; }
        }
        seed.amplitudes.push_back(std::max(0.0, best - base));
    }
    return seed;
}

NuclearDistribution peaks_to_distribution(const PeakSet& peaks,
                                          const hamiltonian::SpinSystemParams& p) {
    const auto centers = spectra::odmr_line_centers(p);
    if (peaks.size() != 7)
        throw std::invalid_argument("peaks_to_distribution: expected 7 peaks");
    double spacing = 1e300;
    for (int m = -3; m < 3; ++m)
        spacing = std::min(spacing, std::abs(centers[static_cast<std::size_t>(m + 4)] -
                                             centers[static_cast<std::size_t>(m + 3)]));
    NuclearDistribution rho;
    for (int m = -3; m <= 3; ++m) {
        const double c = centers[static_cast<std::size_t>(m + 3)];
        double bestd = 1e300;
        std::size_t best = 0;
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            const double d = std::abs(peaks.centers_mhz[k] - c);
            if (d < bestd) { bestd = d; best = k; }
        }
        if (bestd > 0.5 * spacing)
            throw std::invalid_argument(
                "peaks_to_distribution: no fitted peak near the comb position");
        rho[m] = std::max(0.0, peaks.amplitudes[best]);
    }
    rho.normalize();
    return rho;
}

// ---------------------------------------------------------------------------

double polarization(const NuclearDistribution& rho) {
    double num = 0, den = 0;
    for (int m = -3; m <= 3; ++m) {
        if (!(rho[m] >= 0)) throw std::invalid_argument("polarization: negative population");
        num += m * rho[m];
        den += rho[m];
    }
    if (den <= 0) throw std::invalid_argument("polarization: all populations are zero");
    return num / (3.0 * den);
}

// ---------------------------------------------------------------------------
// damped cosine fit

namespace {

struct RabiPacking {
    int n_extra = 1;
    // order: a, g, f, phi, (c_k, g_k)*, baseline
    int n_params() const { return 4 + 2 * n_extra + 1; }
};

}  // namespace

RabiFit fit_damped_cosine(const TimeTrace& trace, const RabiFit& init,
                          const RabiFitOptions& opts) {
    const std::size_t m = trace.t_us.size();
    if (m != trace.population.size())
        throw std::invalid_argument("fit_damped_cosine: trace size mismatch");
    if (!(init.f_rabi_mhz > 0))
        throw std::invalid_argument("fit_damped_cosine: init.f_rabi must be > 0");
    const double span = m ? trace.t_us.back() - trace.t_us.front() : 0;
    if (m < 8 || span * init.f_rabi_mhz < 1.0)
        throw std::invalid_argument(
            "fit_damped_cosine: need >= 8 samples spanning one period of init.f_rabi");

    RabiPacking pk;
    pk.n_extra = opts.n_extra_decays;
    const double g_floor = 1.0 / (50.0 * span);

    VectorXd p0(pk.n_params());
    {
        int at = 0;
        p0(at++) = init.amplitude != 0 ? init.amplitude : 0.5;
        p0(at++) = init.t2_star_us > 0 ? 1.0 / init.t2_star_us : g_floor;
        p0(at++) = init.f_rabi_mhz;
        p0(at++) = init.phase_rad;
        for (int k = 0; k < pk.n_extra; ++k) {
            const bool have = static_cast<std::size_t>(k) < init.extra_decays.size();
            p0(at++) = have ? init.extra_decays[static_cast<std::size_t>(k)].first : 0.0;
            const double tau = have ? init.extra_decays[static_cast<std::size_t>(k)].second : 0.0;
            p0(at++) = tau > 0 ? 1.0 / tau : 2.0 / span;
        }
        p0(at++) = init.baseline;
    }

    auto residual = [&](const VectorXd& params, VectorXd& r, MatrixXd* jac) {
        const double a = params(0), g = params(1), f = params(2), phi = params(3);
        const double b = params(pk.n_params() - 1);
        r.resize(static_cast<long>(m));
        if (jac) jac->setZero(static_cast<long>(m), params.size());
        for (std::size_t i = 0; i < m; ++i) {
            const double t = trace.t_us[i];
            const double env = std::exp(-g * t);
            const double theta = two_pi * f * t + phi;
            const double c = std::cos(theta), s = std::sin(theta);
            double y = a * env * c + b;
            for (int k = 0; k < pk.n_extra; ++k) {
                const double ck = params(4 + 2 * k), gk = params(5 + 2 * k);
                y += ck * std::exp(-gk * t);
            }
            r(static_cast<long>(i)) = y - trace.population[i];
            if (!jac) continue;
            (*jac)(static_cast<long>(i), 0) = env * c;
            (*jac)(static_cast<long>(i), 1) = -t * a * env * c;
            (*jac)(static_cast<long>(i), 2) = -two_pi * t * a * env * s;
            (*jac)(static_cast<long>(i), 3) = -a * env * s;
            for (int k = 0; k < pk.n_extra; ++k) {
                const double ck = params(4 + 2 * k), gk = params(5 + 2 * k);
                const double ek = std::exp(-gk * t);
                (*jac)(static_cast<long>(i), 4 + 2 * k) = ek;
                (*jac)(static_cast<long>(i), 5 + 2 * k) = -t * ck * ek;
            }
            (*jac)(static_cast<long>(i), params.size() - 1) = 1.0;
        }
    };

    const LMResult lm = levenberg_marquardt(residual, p0, opts.lm);

    RabiFit out;
    out.amplitude = lm.params(0);
    const double g = lm.params(1);
    if (g <= g_floor) {
        out.t2_star_us = 1.0 / g_floor;
        out.t2_upper_bound = true;
    } else {
        out.t2_star_us = 1.0 / g;
    }
    out.f_rabi_mhz = std::abs(lm.params(2));
    out.phase_rad = lm.params(3);
    for (int k = 0; k < pk.n_extra; ++k) {
        const double gk = lm.params(5 + 2 * k);
        out.extra_decays.emplace_back(lm.params(4 + 2 * k),
                                      1.0 / std::max(gk, g_floor));
    }
    out.baseline = lm.params(pk.n_params() - 1);
    out.residual_rms = std::sqrt(lm.cost / static_cast<double>(m));
    out.converged = lm.converged;
    return out;
}

// ---------------------------------------------------------------------------

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                     bool zero_intercept) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_linear: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_linear: need at least 2 points");

    LinearFit out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    if (zero_intercept) {
        if (sxx <= 0) throw std::invalid_argument("fit_linear: degenerate x");
        out.slope = sxy / sxx;
        out.intercept = 0;
    } else {
        const double det = nn * sxx - sx * sx;
        if (std::abs(det) <= 1e-12 * (1.0 + nn * sxx))
            throw std::invalid_argument("fit_linear: degenerate x");
        out.slope = (nn * sxy - sx * sy) / det;
        out.intercept = (sy * sxx - sx * sxy) / det;
    }
    const double ybar = sy / nn;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = out.slope * x[i] + out.intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace hbnspin::analysis
