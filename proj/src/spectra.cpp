#include "hbnspin/spectra.hpp"

#include "hbnspin/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace hbnspin::spectra {

using spinops::Operator;

namespace {

int thread_cap() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* s = std::getenv("HBN_SPINLAB_THREADS")) {
        const int n = std::atoi(s);
        if (n >= 1) return std::min(n, hw);
    }
    return 1;
}

void validate_populations(const MiPopulations& rho) {
    double sum = 0;
    for (double r : rho) {
        if (!(r >= 0.0)) throw std::invalid_argument("rho: populations must be >= 0");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("rho: populations must sum to 1");
}

double line_shape(double detuning, double fwhm, LineShape shape) {
    const double hw = 0.5 * fwhm;
    if (shape == LineShape::Gaussian) {
        const double sigma = fwhm / 2.3548200450309493;  // fwhm = 2 sqrt(2 ln 2) sigma
        const double z = detuning / sigma;
        return std::exp(-0.5 * z * z);
    }
    return hw * hw / (detuning * detuning + hw * hw);
}

}  // namespace

// ---------------------------------------------------------------------------

LevelSweep level_sweep(const SpinSystemParams& base, const std::vector<double>& b_mt) {
    if (b_mt.empty()) throw std::invalid_argument("level_sweep: empty field range");
    LevelSweep out;
    out.b_mt = b_mt;
    out.values.resize(b_mt.size());

    const int nthreads = std::min<int>(thread_cap(), static_cast<int>(b_mt.size()));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto es = eigh(hamiltonian::build_hamiltonian(base.with_field(b_mt[i])));
            out.values[i] = es.values;
        }
    };
    if (nthreads <= 1) {
        work(0, b_mt.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (b_mt.size() + static_cast<std::size_t>(nthreads) - 1) /
                                  static_cast<std::size_t>(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * chunk;
            const std::size_t end = std::min(begin + chunk, b_mt.size());
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

LevelSweep level_sweep(Manifold m, const std::vector<double>& b_mt) {
    return level_sweep(hamiltonian::default_params(m), b_mt);
}

namespace {

// |weighted mean energy of the m_s=0 branch - same for m_s=-1|
double branch_gap(const SpinSystemParams& base, double b_mt) {
    const auto es = eigh(hamiltonian::build_hamiltonian(base.with_field(b_mt)));
    const auto& ms_table = spinops::basis_ms();
    double e0 = 0, w0 = 0, em = 0, wm = 0;
    for (int k = 0; k < es.dim(); ++k) {
        double wz = 0, wmm = 0;
        for (int i = 0; i < 81; ++i) {
            const double w = std::norm(es.vectors(i, k));
            if (ms_table[static_cast<std::size_t>(i)] == 0) wz += w;
            else if (ms_table[static_cast<std::size_t>(i)] == -1) wmm += w;
        }
        e0 += es.values[static_cast<std::size_t>(k)] * wz;
        w0 += wz;
        em += es.values[static_cast<std::size_t>(k)] * wmm;
        wm += wmm;
    }
    return std::abs(e0 / w0 - em / wm);
}

}  // namespace

double find_lac(const SpinSystemParams& base) {
    constexpr double b_lo = 1.0, b_hi = 300.0, coarse = 0.5, resolution = 0.01;

    double best_b = b_lo, best_g = branch_gap(base, b_lo);
    for (double b = b_lo + coarse; b <= b_hi + 1e-12; b += coarse) {
        const double g = branch_gap(base, b);
        if (g < best_g) { best_g = g; best_b = b; }
    }
    if (best_b <= b_lo + coarse / 2 || best_b >= b_hi - coarse / 2)
        throw std::runtime_error("find_lac: no interior minimum bracketed in [1, 300] mT");

    // golden-section refine on [best_b - coarse, best_b + coarse]
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_b - coarse, b = best_b + coarse;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = branch_gap(base, x1), f2 = branch_gap(base, x2);
    while (b - a > resolution) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = branch_gap(base, x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = branch_gap(base, x2);
        }
    }
    return 0.5 * (a + b);
}

double find_lac(Manifold m) { return find_lac(hamiltonian::default_params(m)); }

// ---------------------------------------------------------------------------

std::vector<TransitionLine> transition_catalog(const EigenSystem& es,
                                               const Operator& v,
                                               FrequencyWindow window,
                                               const std::vector<double>& populations,
                                               double floor_rel) {
    if (window.min_mhz < 0)
        throw std::invalid_argument("transition_catalog: window.min must be >= 0");
    if (populations.size() != static_cast<std::size_t>(es.dim()))
        throw std::invalid_argument("transition_catalog: populations size mismatch");

    // <f|V|i> for all pairs in one pass
    const spinops::Matrix vme = es.vectors.adjoint() * v.entries() * es.vectors;

    std::vector<TransitionLine> lines;
    double max_strength = 0;
    for (int i = 0; i < es.dim(); ++i) {
        for (int f = 0; f < es.dim(); ++f) {
            const double freq = es.values[static_cast<std::size_t>(f)] -
                                es.values[static_cast<std::size_t>(i)];
            if (freq <= 0 || freq < window.min_mhz || freq > window.max_mhz) continue;
            const double s = std::norm(vme(f, i));
            if (s <= 0) continue;
            TransitionLine line;
            line.freq_mhz = freq;
            line.strength = s;
            line.weight = populations[static_cast<std::size_t>(i)];
            line.ms_from = es.labels[static_cast<std::size_t>(i)].ms;
            line.ms_to = es.labels[static_cast<std::size_t>(f)].ms;
            line.state_i = i;
            line.state_f = f;
            lines.push_back(line);
            max_strength = std::max(max_strength, s);
        }
    }
    const double floor = floor_rel * max_strength;
    std::erase_if(lines, [floor](const TransitionLine& l) { return l.strength <= floor; });
    std::sort(lines.begin(), lines.end(), [](const TransitionLine& a, const TransitionLine& b) {
        if (a.freq_mhz != b.freq_mhz) return a.freq_mhz < b.freq_mhz;
        return std::tie(a.state_i, a.state_f) < std::tie(b.state_i, b.state_f);
    });
    return lines;
}

// ---------------------------------------------------------------------------

int GridSpec::n() const {
    if (!(step > 0) || stop < start)
        throw std::invalid_argument("grid: require step > 0 and stop >= start");
    return static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
}

std::vector<double> GridSpec::points() const {
    const int count = n();
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
    return out;
}

MiPopulations multiplicity_populations() {
    MiPopulations rho{};
    for (int m = -3; m <= 3; ++m)
        rho[static_cast<std::size_t>(m + 3)] = spinops::mi_multiplicity(m) / 27.0;
    return rho;
}

std::array<double, 7> odmr_line_centers(const SpinSystemParams& p) {
    const auto h = hamiltonian::build_hamiltonian(p);
    const auto& mi_table = spinops::basis_total_mi();
    // mean diagonal gap E(ms=-1, n) - E(ms=0, n) over the 27 configs of each m_I
    std::array<double, 7> sum{}, cnt{};
    for (int k = 0; k < 27; ++k) {
        const int mi = mi_table[static_cast<std::size_t>(27 + k)];
        sum[static_cast<std::size_t>(mi + 3)] +=
            std::real(h(54 + k, 54 + k)) - std::real(h(27 + k, 27 + k));
        cnt[static_cast<std::size_t>(mi + 3)] += 1;
    }
    std::array<double, 7> centers{};
    for (int b = 0; b < 7; ++b)
        centers[static_cast<std::size_t>(b)] =
            sum[static_cast<std::size_t>(b)] / cnt[static_cast<std::size_t>(b)];
    return centers;
}

std::array<OdmrLine, 7> odmr_lines(const SpinSystemParams& p, const MiPopulations& rho) {
    validate_populations(rho);
    const auto centers = odmr_line_centers(p);
    std::array<OdmrLine, 7> lines;
    for (int m = -3; m <= 3; ++m) {
        auto& l = lines[static_cast<std::size_t>(m + 3)];
        l.m_i = m;
        l.center_mhz = centers[static_cast<std::size_t>(m + 3)];
        l.amplitude = rho[static_cast<std::size_t>(m + 3)];
    }
    std::sort(lines.begin(), lines.end(),
              [](const OdmrLine& a, const OdmrLine& b) { return a.center_mhz < b.center_mhz; });
    return lines;
}

Spectrum odmr_spectrum(const SpinSystemParams& p, const MiPopulations& rho,
                       double fwhm_mhz, const GridSpec& grid, LineShape shape) {
    if (!(fwhm_mhz > 0)) throw std::invalid_argument("odmr_spectrum: fwhm must be > 0");
    const auto lines = odmr_lines(p, rho);
    Spectrum s;
    s.fwhm_mhz = fwhm_mhz;
    s.freqs_mhz = grid.points();
    s.intensity.assign(s.freqs_mhz.size(), 0.0);
    for (std::size_t i = 0; i < s.freqs_mhz.size(); ++i)
        for (const auto& l : lines)
            s.intensity[i] += l.amplitude * line_shape(s.freqs_mhz[i] - l.center_mhz,
                                                       fwhm_mhz, shape);
    return s;
}

Spectrum odnmr_spectrum(const SpinSystemParams& p, int branch_ms, double fwhm_mhz,
                        const GridSpec& grid, bool mw_pi_applied,
                        const OdnmrOptions& opts) {
    if (!(fwhm_mhz > 0)) throw std::invalid_argument("odnmr_spectrum: fwhm must be > 0");
    if (branch_ms != 0 && branch_ms != -1)
        throw std::invalid_argument("odnmr_spectrum: branch must be 0 or -1");
    validate_populations(opts.rho);

    const auto es = eigh(hamiltonian::build_hamiltonian(p));
    const auto v = hamiltonian::drive_operator(p, hamiltonian::DriveKind::RF_inplane);

    const int populated_ms = mw_pi_applied ? -1 : 0;

    // membership of eigenstate k in branch ms: full when dominant, the actual
    // branch weight when mixed, zero otherwise
    auto membership = [&](int k, int ms) -> double {
        const auto& lab = es.labels[static_cast<std::size_t>(k)];
        if (!lab.mixed) return lab.ms == ms ? 1.0 : 0.0;
        return es.branch_weight(k, ms);
    };

    std::vector<double> populations(static_cast<std::size_t>(es.dim()), 0.0);
    for (int k = 0; k < es.dim(); ++k) {
        const double m = membership(k, populated_ms);
        if (m <= 0) continue;
        const int mi = es.labels[static_cast<std::size_t>(k)].mi;
        populations[static_cast<std::size_t>(k)] =
            m * opts.rho[static_cast<std::size_t>(mi + 3)] / spinops::mi_multiplicity(mi);
    }

    FrequencyWindow window{std::max(grid.start, 0.0), grid.stop};
    auto lines = transition_catalog(es, v, window, populations, opts.strength_floor_rel);
    std::erase_if(lines, [&](const TransitionLine& l) {
        return membership(l.state_i, branch_ms) <= 0 || membership(l.state_f, branch_ms) <= 0;
    });

    Spectrum s;
    s.fwhm_mhz = fwhm_mhz;
    s.freqs_mhz = grid.points();
    s.intensity.assign(s.freqs_mhz.size(), 0.0);
    for (const auto& l : lines) {
        const double amp = l.strength * l.weight * membership(l.state_f, branch_ms) *
                           membership(l.state_i, branch_ms);
        if (amp <= 0) continue;
        for (std::size_t i = 0; i < s.freqs_mhz.size(); ++i)
            s.intensity[i] += amp * line_shape(s.freqs_mhz[i] - l.freq_mhz, fwhm_mhz, opts.shape);
    }
    return s;
}

double band_centroid(const Spectrum& s, double lo_mhz, double hi_mhz) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < s.freqs_mhz.size(); ++i) {
        const double f = s.freqs_mhz[i];
        if (f < lo_mhz || f > hi_mhz) continue;
        num += f * s.intensity[i];
        den += s.intensity[i];
    }
    if (den <= 0) throw std::domain_error("band_centroid: no intensity in window");
    return num / den;
}

double band_intensity(const Spectrum& s, double lo_mhz, double hi_mhz) {
    double sum = 0;
    for (std::size_t i = 0; i < s.freqs_mhz.size(); ++i)
        if (s.freqs_mhz[i] >= lo_mhz && s.freqs_mhz[i] <= hi_mhz) sum += s.intensity[i];
    return sum;
}

// ---------------------------------------------------------------------------

double c_nn(double b_mt) {
    namespace k = hbnspin::constants;
    const double detuning = std::abs(k::d_gs_mhz - k::gamma_e_mhz_per_mt * b_mt);
    if (detuning <= 1.0)
        throw std::domain_error("c_nn: field within 1 MHz of the GSLAC, formula invalid");
    return k::a_tran_mhz * k::a_tran_mhz / detuning;
}

double d_nn(double r_nn_nm, DipoleConvention convention) {
    namespace k = hbnspin::constants;
    if (!(r_nn_nm > 0)) throw std::invalid_argument("d_nn: r_nn must be > 0");
    const double r_m = r_nn_nm * 1e-9;
    const double gamma_hz_per_t = k::gamma_n_mhz_per_mt * 1e9;  // cyclic, Hz/T
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    double gamma = gamma_hz_per_t;
    double to_hz = 1.0;
    if (convention == DipoleConvention::GammaAngular) {
        gamma = two_pi * gamma_hz_per_t;
        to_hz = 1.0 / two_pi;  // formula then yields rad/s
    }
    return k::mu0_si * gamma * gamma * k::hbar_si / (2.0 * r_m * r_m * r_m) * to_hz;
}

}  // namespace hbnspin::spectra
