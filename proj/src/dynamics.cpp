#include "hbnspin/dynamics.hpp"

#include "hbnspin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace hbnspin::dynamics {

using spinops::Matrix;
using Complex = std::complex<double>;
using Eigen::VectorXcd;

namespace {
constexpr double two_pi = 2.0 * 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// NuclearDistribution

void NuclearDistribution::validate() const {
    double sum = 0;
    for (double r : rho) {
        if (!(r >= 0)) throw std::invalid_argument("NuclearDistribution: negative population");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("NuclearDistribution: populations must sum to 1");
}

void NuclearDistribution::normalize() {
    double sum = 0;
    for (double r : rho) sum += r;
    if (sum <= 0) throw std::invalid_argument("NuclearDistribution: cannot normalize zero vector");
    for (double& r : rho) r /= sum;
}

NuclearDistribution NuclearDistribution::multiplicity() {
    NuclearDistribution d;
    for (int m = -3; m <= 3; ++m) d[m] = spinops::mi_multiplicity(m) / 27.0;
    return d;
}

NuclearDistribution NuclearDistribution::delta(int m_i) {
    if (m_i < -3 || m_i > 3) throw std::out_of_range("NuclearDistribution::delta: m_I out of range");
    NuclearDistribution d;
    d[m_i] = 1.0;
    return d;
}

void PumpParams::validate() const {
    if (!(pump_rate_per_s >= 0)) throw std::invalid_argument("pump: pump_rate must be >= 0");
    if (!(depol_rate_per_s >= 0)) throw std::invalid_argument("pump: depol_rate must be >= 0");
    if (cycles_cap < 1) throw std::invalid_argument("pump: cycles_cap must be >= 1");
    es_params.validate();
    gs_params.validate();
}

// ---------------------------------------------------------------------------
// flip probability

namespace {

// rms transverse-hyperfine coupling between the product-basis sectors
// (m_s=0, m_I) and (m_s=-1, m_I+1), per initial state
double sector_coupling_rms(const SpinSystemParams& p, int m_i) {
    const auto vhf = hamiltonian::transverse_hyperfine(p);
    const auto& mi_table = spinops::basis_total_mi();
    double total = 0;
    int g = 0;
    for (int ki = 0; ki < 27; ++ki) {
        if (mi_table[static_cast<std::size_t>(27 + ki)] != m_i) continue;
        ++g;
        for (int kf = 0; kf < 27; ++kf)
            if (mi_table[static_cast<std::size_t>(54 + kf)] == m_i + 1)
                total += std::norm(vhf(54 + kf, 27 + ki));
    }
    return g > 0 ? std::sqrt(total / g) : 0.0;
}

// weight-averaged energy of the product-basis sector (m_s block, m_I) over
// the eigensystem; smooth in B and defined through any anti-crossing
double sector_energy(const EigenSystem& es, int ms, int m_i) {
    const auto& mi_table = spinops::basis_total_mi();
    const int block = (1 - ms) * 27;
    double num = 0, den = 0;
    for (int k = 0; k < es.dim(); ++k) {
        double w = 0;
        for (int j = 0; j < 27; ++j)
            if (mi_table[static_cast<std::size_t>(block + j)] == m_i)
                w += std::norm(es.vectors(block + j, k));
        num += es.values[static_cast<std::size_t>(k)] * w;
        den += w;
    }
    return num / den;
}

std::array<double, 6> flip_probabilities_impl(const SpinSystemParams& p,
                                              const EigenSystem& es) {
    std::array<double, 6> out{};
    for (int m_i = -3; m_i <= 2; ++m_i) {
        const double a_eff = sector_coupling_rms(p, m_i);
        if (a_eff <= 0) { out[static_cast<std::size_t>(m_i + 3)] = 0; continue; }
        const double delta = sector_energy(es, 0, m_i) - sector_energy(es, -1, m_i + 1);
        const double a2 = a_eff * a_eff;
        out[static_cast<std::size_t>(m_i + 3)] = a2 / (a2 + delta * delta);
    }
    return out;
}

}  // namespace

std::array<double, 6> flip_probabilities(const SpinSystemParams& p) {
    const auto es = spectra::eigh(hamiltonian::build_hamiltonian(p));
    return flip_probabilities_impl(p, es);
}

double flip_probability(const SpinSystemParams& p, int m_i) {
    if (m_i < -3 || m_i > 3) throw std::out_of_range("flip_probability: m_I out of range");
    if (m_i == 3) return 0.0;
    return flip_probabilities(p)[static_cast<std::size_t>(m_i + 3)];
}

// ---------------------------------------------------------------------------
// pumping chain

PumpResult pump_steady_state(const PumpParams& p) {
    p.validate();
    PumpResult out;
    if (p.pump_rate_per_s == 0) {
        out.rho = NuclearDistribution::multiplicity();
        out.polarization = 0;
        out.converged = true;
        return out;
    }

    const auto p_es = flip_probabilities(p.es_params);
    const auto p_gs = flip_probabilities(p.gs_params);
    std::array<double, 6> flip{};
    for (int m = 0; m < 6; ++m)
        flip[static_cast<std::size_t>(m)] =
            1.0 - (1.0 - p_es[static_cast<std::size_t>(m)]) *
                      (1.0 - p_gs[static_cast<std::size_t>(m)]);

    const double d = std::min(1.0, p.depol_rate_per_s / p.pump_rate_per_s);
    const auto mult = NuclearDistribution::multiplicity();

    NuclearDistribution rho = mult;
    long cycle = 0;
    for (; cycle < p.cycles_cap; ++cycle) {
        NuclearDistribution next = rho;
        for (int m = -3; m <= 2; ++m) {
            const double moved = rho[m] * flip[static_cast<std::size_t>(m + 3)];
            next[m] -= moved;
            next[m + 1] += moved;
        }
        double l1 = 0;
        for (int m = -3; m <= 3; ++m) {
            next[m] = (1.0 - d) * next[m] + d * mult[m];
            l1 += std::abs(next[m] - rho[m]);
        }
        rho = next;
        if (l1 < 1e-10) { out.converged = true; ++cycle; break; }
    }
    out.cycles = cycle;
    out.rho = rho;
    out.polarization = analysis::polarization(rho);
    return out;
}

// ---------------------------------------------------------------------------
// piecewise-constant unitary propagation

namespace {

struct Propagator {
    // prefix products of step unitaries from the period start, every `stride`
    // steps (index j holds steps [0, j*stride)), plus the full-period product
    std::vector<Matrix> prefixes;
    Matrix period;   // product over one full drive period
    long n_per = 0;  // steps per period
    long stride = 1;
    double dt_us = 0;
};

Matrix step_unitary(const Matrix& m, double dt_us) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(m);
    const auto& lam = s.eigenvalues();
    VectorXcd phases(lam.size());
    for (int i = 0; i < lam.size(); ++i)
        phases(i) = std::polar(1.0, -two_pi * lam(i) * dt_us);
    return s.eigenvectors() * phases.asDiagonal() * s.eigenvectors().adjoint();
}

// H(t) = diag(d) + b1 cos(2 pi f t + phase) V, all in the static eigenbasis
Propagator build_propagator(const Eigen::VectorXd& d, const Matrix& v, double f_mhz,
                            double b1_mt, double phase, double steps_per_scale) {
    const double hnorm = d.cwiseAbs().maxCoeff();
    const double scale = std::max(f_mhz, hnorm);
    if (!(scale > 0)) throw std::invalid_argument("rabi_evolve: zero frequency scale");

    Propagator prop;
    const double period_us = 1.0 / f_mhz;
    prop.n_per = static_cast<long>(std::ceil(steps_per_scale * scale / f_mhz));
    prop.dt_us = period_us / static_cast<double>(prop.n_per);
    if (prop.dt_us < 1e-12)
        throw std::runtime_error("rabi_evolve: step size underflow");
    prop.stride = std::max<long>(1, (prop.n_per + 511) / 512);

    const int n = static_cast<int>(d.size());
    Matrix running = Matrix::Identity(n, n);
    prop.prefixes.push_back(running);
    Matrix hstep(n, n);
    for (long k = 0; k < prop.n_per; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * prop.dt_us;
        const double c = b1_mt * std::cos(two_pi * f_mhz * t_mid + phase);
        hstep = c * v;
        hstep.diagonal() += d.cast<Complex>();
        running = (step_unitary(hstep, prop.dt_us) * running).eval();
        if ((k + 1) % prop.stride == 0 || k + 1 == prop.n_per)
            prop.prefixes.push_back(running);
    }
    prop.period = running;
    return prop;
}

}  // namespace

std::vector<VectorXcd> propagate_states(const SpinSystemParams& p, double drive_freq_mhz,
                                        double b1_mt, const std::vector<double>& times_us,
                                        const VectorXcd& psi0, const EvolveOptions& opts) {
    for (std::size_t i = 0; i < times_us.size(); ++i) {
        if (times_us[i] < 0) throw std::invalid_argument("rabi_evolve: times must be >= 0");
        if (i > 0 && times_us[i] < times_us[i - 1])
            throw std::invalid_argument("rabi_evolve: times must be ascending");
    }
    const auto es = spectra::eigh(hamiltonian::build_hamiltonian(p));
    const Eigen::VectorXd d =
        Eigen::Map<const Eigen::VectorXd>(es.values.data(), static_cast<long>(es.values.size()));
    const Matrix v = es.vectors.adjoint() *
                     hamiltonian::drive_operator(p).entries() * es.vectors;

    std::vector<VectorXcd> out;
    out.reserve(times_us.size());

    // no drive, or a DC drive: the Hamiltonian is time independent
    if (b1_mt == 0.0 || drive_freq_mhz <= 0.0) {
        Matrix hconst = b1_mt * v;
        hconst.diagonal() += d.cast<Complex>();
        Eigen::SelfAdjointEigenSolver<Matrix> s(hconst);
        const VectorXcd amp0 = s.eigenvectors().adjoint() * psi0;
        for (double t : times_us) {
            VectorXcd amp = amp0;
            for (int i = 0; i < amp.size(); ++i)
                amp(i) *= std::polar(1.0, -two_pi * s.eigenvalues()(i) * t);
            out.push_back(s.eigenvectors() * amp);
        }
        return out;
    }

    const Propagator prop = build_propagator(d, v, drive_freq_mhz, b1_mt,
                                             opts.phase_rad, opts.steps_per_scale);

    VectorXcd psi_boundary = psi0;  // state at the start of period q_cur
    long q_cur = 0;
    for (double t : times_us) {
        long steps = std::lround(t / prop.dt_us);
        long q = steps / prop.n_per;
        long r = steps % prop.n_per;
        // snap the in-period offset to a cached prefix
        long j = (r + prop.stride / 2) / prop.stride;
        if (j * prop.stride >= prop.n_per) { ++q; j = 0; }
        while (q_cur < q) {
            psi_boundary = (prop.period * psi_boundary).eval();
            ++q_cur;
        }
        const std::size_t jj = std::min(static_cast<std::size_t>(j), prop.prefixes.size() - 1);
        out.push_back(prop.prefixes[jj] * psi_boundary);
    }
    return out;
}

TimeTrace rabi_evolve(const SpinSystemParams& p, double drive_freq_mhz, double b1_mt,
                      const std::vector<double>& times_us, int initial_state,
                      const EvolveOptions& opts) {
    if (!(b1_mt >= 0)) throw std::invalid_argument("rabi_evolve: b1 must be >= 0");
    const int dim = 81;
    if (initial_state < 0 || initial_state >= dim)
        throw std::out_of_range("rabi_evolve: initial state index out of range");
    const int target = opts.target_state < 0 ? initial_state : opts.target_state;
    if (target >= dim) throw std::out_of_range("rabi_evolve: target state index out of range");

    VectorXcd psi0 = VectorXcd::Zero(dim);
    psi0(initial_state) = 1.0;
    const auto states = propagate_states(p, drive_freq_mhz, b1_mt, times_us, psi0, opts);

    TimeTrace trace;
    trace.t_us = times_us;
    trace.population.reserve(times_us.size());
    for (const auto& psi : states)
        trace.population.push_back(std::norm(psi(target)));
    return trace;
}

// ---------------------------------------------------------------------------
// hyperfine enhancement

namespace {

// normalized projection of an eigenstate onto its dominant (m_s, m_I) product
// sector; the A=0 adiabatic counterpart
VectorXcd bare_counterpart(const EigenSystem& es, int k) {
    const auto& lab = es.labels[static_cast<std::size_t>(k)];
    const auto& mi_table = spinops::basis_total_mi();
    const int block = (1 - lab.ms) * 27;
    VectorXcd out = VectorXcd::Zero(81);
    for (int j = 0; j < 27; ++j)
        if (mi_table[static_cast<std::size_t>(block + j)] == lab.mi)
            out(block + j) = es.vectors(block + j, k);
    const double n = out.norm();
    if (n < 1e-12)
        throw std::domain_error("hyperfine_enhancement: state has no weight on its sector");
    return out / n;
}

}  // namespace

double hyperfine_enhancement(const SpinSystemParams& p, const EigenSystem& es,
                             int state_i, int state_f) {
    if (state_i < 0 || state_i >= es.dim() || state_f < 0 || state_f >= es.dim())
        throw std::out_of_range("hyperfine_enhancement: state index out of range");
    const auto& li = es.labels[static_cast<std::size_t>(state_i)];
    const auto& lf = es.labels[static_cast<std::size_t>(state_f)];
    if (li.ms != lf.ms || li.mixed || lf.mixed)
        throw std::invalid_argument(
            "hyperfine_enhancement: transition is not nuclear-like (branches differ)");

    const auto [sx, sy, sz] = spinops::spin1_operators();
    Matrix ix = spinops::embed(sx, 1).entries() + spinops::embed(sx, 2).entries() +
                spinops::embed(sx, 3).entries();

    const VectorXcd bi = bare_counterpart(es, state_i);
    const VectorXcd bf = bare_counterpart(es, state_f);
    const double m_bare = std::abs(Complex(bf.adjoint() * ix * bi));
    if (p.gamma_n_mhz_per_mt * m_bare < 1e-9)
        throw std::domain_error("hyperfine_enhancement: no bare counterpart transition");

    const Matrix v = hamiltonian::drive_operator(p).entries();
    const double driven =
        std::abs(Complex(es.vectors.col(state_f).adjoint() * v * es.vectors.col(state_i)));
    return driven / (p.gamma_n_mhz_per_mt * m_bare);
}

double hyperfine_enhancement(const SpinSystemParams& p, int state_i, int state_f) {
    const auto es = spectra::eigh(hamiltonian::build_hamiltonian(p));
    return hyperfine_enhancement(p, es, state_i, state_f);
}

double enhancement_perturbative(const SpinSystemParams& p) {
    const double detuning = p.d_zfs_mhz - p.gamma_e_mhz_per_mt * p.b0_mt;
    return (p.gamma_e_mhz_per_mt / p.gamma_n_mhz_per_mt) * p.a_tran() / detuning;
}

}  // namespace hbnspin::dynamics
