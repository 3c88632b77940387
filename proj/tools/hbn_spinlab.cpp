// hbn-spinlab: command-line front end for the V_B- electron/nuclear spin
// simulator.  One subcommand per experiment family; every run writes its
// resolved parameters to a manifest so it can be reproduced byte for byte.

#include "hbnspin/analysis.hpp"
#include "hbnspin/constants.hpp"
#include "hbnspin/csvio.hpp"
#include "hbnspin/dynamics.hpp"
#include "hbnspin/kvconfig.hpp"
#include "hbnspin/spectra.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace hbnspin;
using io::KeyValues;

namespace {

constexpr const char* tool_version = "hbn-spinlab 1.0.0";

// exit codes: 0 ok, 1 usage, 2 validation, 3 file I/O, 4 fit failure,
// 5 internal / non-convergence
enum ExitCode { ok = 0, usage = 1, validation = 2, file_io = 3, fit_failure = 4, internal = 5 };

struct CliError : std::runtime_error {
    CliError(int c, std::string kind, const std::string& msg)
        : std::runtime_error(msg), code(c), kind(std::move(kind)) {}
    int code;
    std::string kind;
};

// ---------------------------------------------------------------------------
// config resolution

struct Defaults {
    KeyValues kv;
    Defaults() {
        namespace k = constants;
        kv.set("manifold", "GS");
        kv.set_double("b0_mT", 74.0);
        kv.set_double("a_tran_MHz", k::a_tran_mhz);
        kv.set_double("a_zz_MHz", k::a_zz_mhz);
        kv.set_double("q_MHz", 0.0);
        kv.set_double("gamma_e_MHz_per_mT", k::gamma_e_mhz_per_mt);
        kv.set_double("gamma_n_MHz_per_mT", k::gamma_n_mhz_per_mt);
        kv.set_double("fwhm_MHz", 12.0);
        kv.set("rho", "uniform-multiplicity");
        kv.set_double("pump_rate_per_s", 1e6);
        kv.set_double("depol_rate_per_s", 2e4);
        kv.set_long("cycles_cap", 200000);
        kv.set_double("rf_b1_mT", 0.2);
        kv.set_double("noise_pct", 0.0);
        kv.set_long("seed", 1);
        kv.set_double("strength_floor_rel", spectra::default_strength_floor_rel);
    }
};

struct Run {
    KeyValues cfg;
    std::string outdir = ".";

    hamiltonian::SpinSystemParams params() const {
        using hamiltonian::Manifold;
        const Manifold m = hamiltonian::manifold_from_string(cfg.get_string("manifold", "GS"));
        auto p = hamiltonian::default_params(m);
        if (cfg.has("d_zfs_MHz")) p.d_zfs_mhz = cfg.get_double("d_zfs_MHz");
        const double at = cfg.get_double("a_tran_MHz", constants::a_tran_mhz);
        const double az = cfg.get_double("a_zz_MHz", constants::a_zz_mhz);
        const auto tensor = hamiltonian::HyperfineTensor::diagonal(at, at, az);
        p.hyperfine = {tensor, tensor, tensor};
        const double q = cfg.get_double("q_MHz", 0.0);
        p.quadrupole_mhz = {cfg.get_double("q1_MHz", q), cfg.get_double("q2_MHz", q),
                            cfg.get_double("q3_MHz", q)};
        p.gamma_e_mhz_per_mt = cfg.get_double("gamma_e_MHz_per_mT", constants::gamma_e_mhz_per_mt);
        p.gamma_n_mhz_per_mt = cfg.get_double("gamma_n_MHz_per_mT", constants::gamma_n_mhz_per_mt);
        p.b0_mt = cfg.get_double("b0_mT", 74.0);
        p.validate();
        return p;
    }

    spectra::MiPopulations rho(const hamiltonian::SpinSystemParams& p) const {
        const std::string spec = cfg.get_string("rho", "uniform-multiplicity");
        if (spec == "uniform-multiplicity") return spectra::multiplicity_populations();
        if (spec.rfind("delta:", 0) == 0) {
            const int mi = std::stoi(spec.substr(6));
            if (mi < -3 || mi > 3) throw CliError(validation, "validation", "rho delta m_I out of -3..3");
            spectra::MiPopulations r{};
            r[static_cast<std::size_t>(mi + 3)] = 1.0;
            return r;
        }
        if (spec == "pumped") {
            dynamics::PumpParams pp;
            pp.pump_rate_per_s = cfg.get_double("pump_rate_per_s", 1e6);
            pp.depol_rate_per_s = cfg.get_double("depol_rate_per_s", 2e4);
            pp.cycles_cap = cfg.get_long("cycles_cap", 200000);
            pp.es_params = hamiltonian::default_params(hamiltonian::Manifold::ES).with_field(p.b0_mt);
            pp.gs_params = hamiltonian::default_params(hamiltonian::Manifold::GS).with_field(p.b0_mt);
            const auto res = dynamics::pump_steady_state(pp);
            if (!res.converged)
                throw CliError(internal, "nonconvergence", "pump chain hit cycles_cap");
            spectra::MiPopulations r{};
            for (int m = -3; m <= 3; ++m) r[static_cast<std::size_t>(m + 3)] = res.rho[m];
            return r;
        }
        const auto vals = KeyValues::parse_list(spec);
        if (vals.size() != 7)
            throw CliError(validation, "validation", "rho must name a preset or give 7 values");
        spectra::MiPopulations r{};
        double sum = 0;
        for (std::size_t i = 0; i < 7; ++i) { r[i] = vals[i]; sum += vals[i]; }
        if (sum <= 0) throw CliError(validation, "validation", "rho values must not be all zero");
        for (auto& v : r) v /= sum;
        return r;
    }

    std::string out_path(const std::string& name) const {
        fs::create_directories(outdir);
        return (fs::path(outdir) / name).string();
    }

    void write_manifest(const std::string& command,
                        const std::vector<std::string>& outputs) const {
        KeyValues m = cfg;
        m.set("command", command);
        m.set("tool_version", tool_version);
        std::string files;
        for (const auto& f : outputs) {
            if (!files.empty()) files += ",";
            files += f;
        }
        m.set("outputs", files);
        m.write_file(out_path(command + ".manifest.txt"));
    }
};

std::vector<double> grid_from_cfg(const KeyValues& cfg, const std::string& key,
                                  const std::string& fallback) {
    return KeyValues::parse_range(cfg.get_string(key, fallback));
}

spectra::GridSpec gridspec_from_cfg(const KeyValues& cfg, const std::string& key,
                                    const std::string& fallback) {
    const std::string text = cfg.get_string(key, fallback);
    const auto c1 = text.find(':');
    const auto c2 = text.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw CliError(validation, "validation", key + " must be start:stop:step");
    spectra::GridSpec g;
    g.start = std::stod(text.substr(0, c1));
    g.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    g.step = std::stod(text.substr(c2 + 1));
    g.n();  // validates
    return g;
}

// ---------------------------------------------------------------------------
// subcommands

std::string constants_text() {
    namespace k = constants;
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    std::string s;
    s += "# constants table: V_B- spin defect in hexagonal boron nitride\n";
    s += "# energies as frequencies (H/h) in MHz, fields in mT\n";
    s += "D_GS_MHz = " + fmt(k::d_gs_mhz) + "  # ground-state zero-field splitting\n";
    s += "D_ES_MHz = " + fmt(k::d_es_mhz) + "  # excited-state zero-field splitting\n";
    s += "gamma_e_MHz_per_mT = " + fmt(k::gamma_e_mhz_per_mt) +
         "  # electron gyromagnetic ratio (28 GHz/T)\n";
    s += "gamma_n_MHz_per_mT = " + fmt(k::gamma_n_mhz_per_mt) +
         "  # 14N gyromagnetic ratio (3.076 MHz/T)\n";
    s += "gamma_ratio = " + fmt(k::gamma_ratio()) + "  # gamma_e / gamma_n\n";
    s += "A_zz_MHz = " + fmt(k::a_zz_mhz) + "  # axial hyperfine constant, nearest 14N\n";
    s += "A_tran_MHz = " + fmt(k::a_tran_mhz) + "  # transverse hyperfine (A_xx+A_yy)/2\n";
    s += "Q_MHz = 0  # 14N quadrupole constant: not pinned by published data, config input\n";
    s += "r_NN_hBN_nm = " + fmt(k::r_nn_hbn_nm) + "  # nearest N-N distance in hBN\n";
    s += "ESLAC_mT_A0 = " + fmt(k::d_es_mhz / k::gamma_e_mhz_per_mt) +
         "  # D_ES/gamma_e, zero-coupling crossing\n";
    s += "GSLAC_mT_A0 = " + fmt(k::d_gs_mhz / k::gamma_e_mhz_per_mt) +
         "  # D_GS/gamma_e, zero-coupling crossing\n";
    return s;
}

void cmd_constants(Run& run, bool to_file) {
    const std::string text = constants_text();
    std::cout << text;
    if (to_file) {
        const std::string path = run.out_path("constants.txt");
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw CliError(file_io, "io", "cannot write " + tmp);
            out << text;
        }
        if (std::rename(tmp.c_str(), path.c_str()) != 0)
            throw CliError(file_io, "io", "cannot rename " + tmp);
        run.write_manifest("constants", {"constants.txt"});
    }
}

void cmd_levels(Run& run) {
    const auto p = run.params();
    const auto bs = grid_from_cfg(run.cfg, "b_sweep_mT", "60:90:0.5");
    const auto sweep = spectra::level_sweep(p, bs);
    std::string header = "b_mT";
    for (int i = 0; i < 81; ++i) header += ",e" + std::to_string(i) + "_MHz";
    std::vector<std::vector<double>> rows;
    rows.reserve(bs.size());
    for (std::size_t i = 0; i < bs.size(); ++i) {
        std::vector<double> row{bs[i]};
        row.insert(row.end(), sweep.values[i].begin(), sweep.values[i].end());
        rows.push_back(std::move(row));
    }
    io::write_csv(run.out_path("levels.csv"), header, rows);
    run.write_manifest("levels", {"levels.csv"});
    std::cout << "levels: " << bs.size() << " field points -> " << run.out_path("levels.csv")
              << "\n";
}

void cmd_odmr(Run& run) {
    const auto p = run.params();
    const auto rho = run.rho(p);
    const double fwhm = run.cfg.get_double("fwhm_MHz", 12.0);

    // default grid: comb span plus margin
    const auto centers = spectra::odmr_line_centers(p);
    const auto [cmin, cmax] = std::minmax_element(centers.begin(), centers.end());
    const double lo = std::floor(*cmin - 6 * fwhm);
    const double hi = std::ceil(*cmax + 6 * fwhm);
    char fallback[96];
    std::snprintf(fallback, sizeof fallback, "%g:%g:0.25", lo, hi);
    const auto grid = gridspec_from_cfg(run.cfg, "freq_grid_MHz", fallback);

    auto spec = spectra::odmr_spectrum(p, rho, fwhm, grid);
    const double noise_pct = run.cfg.get_double("noise_pct", 0.0);
    if (noise_pct > 0) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(run.cfg.get_long("seed", 1)));
        std::normal_distribution<double> gauss(0.0, noise_pct / 100.0);
        for (auto& y : spec.intensity) y += gauss(rng);
    }
    io::write_spectrum_csv(run.out_path("odmr.csv"), spec);

    const auto lines = spectra::odmr_lines(p, rho);
    std::vector<std::vector<double>> rows;
    for (const auto& l : lines)
        rows.push_back({static_cast<double>(l.m_i), l.center_mhz, l.amplitude});
    io::write_csv(run.out_path("odmr_lines.csv"), "m_I,center_mhz,amplitude", rows);
    run.write_manifest("odmr", {"odmr.csv", "odmr_lines.csv"});
    std::cout << "odmr: 7 lines, spacing "
              << io::format_double(lines[1].center_mhz - lines[0].center_mhz)
              << " MHz -> " << run.out_path("odmr.csv") << "\n";
}

void cmd_nmr(Run& run) {
    const auto p = run.params();
    const auto rho = run.rho(p);
    const double fwhm = run.cfg.get_double("fwhm_MHz2", run.cfg.get_double("nmr_fwhm_MHz", 2.0));
    const auto grid = gridspec_from_cfg(run.cfg, "freq_grid_MHz", "0.25:70:0.05");
    spectra::OdnmrOptions opts;
    opts.rho = rho;
    opts.strength_floor_rel = run.cfg.get_double("strength_floor_rel",
                                                 spectra::default_strength_floor_rel);

    const auto signal = spectra::odnmr_spectrum(p, -1, fwhm, grid, true, opts);
    const auto reference = spectra::odnmr_spectrum(p, 0, fwhm, grid, false, opts);
    io::write_spectrum_csv(run.out_path("nmr.csv"), signal);
    io::write_spectrum_csv(run.out_path("nmr_reference.csv"), reference);
    run.write_manifest("nmr", {"nmr.csv", "nmr_reference.csv"});
    std::cout << "nmr: high-band centroid "
              << io::format_double(spectra::band_centroid(signal, 35, 60)) << " MHz -> "
              << run.out_path("nmr.csv") << "\n";
}

void cmd_pump(Run& run) {
    const auto bs = grid_from_cfg(run.cfg, "b_sweep_mT", "7:110:2");
    dynamics::PumpParams pp;
    pp.pump_rate_per_s = run.cfg.get_double("pump_rate_per_s", 1e6);
    pp.depol_rate_per_s = run.cfg.get_double("depol_rate_per_s", 2e4);
    pp.cycles_cap = run.cfg.get_long("cycles_cap", 200000);

    std::vector<std::vector<double>> rows;
    bool all_converged = true;
    for (double b : bs) {
        pp.es_params = hamiltonian::default_params(hamiltonian::Manifold::ES).with_field(b);
        pp.gs_params = hamiltonian::default_params(hamiltonian::Manifold::GS).with_field(b);
        const auto res = dynamics::pump_steady_state(pp);
        all_converged = all_converged && res.converged;
        rows.push_back({b, res.polarization});
    }
    io::write_csv(run.out_path("pump.csv"), "b_mT,polarization", rows);

    const double b0 = run.cfg.get_double("b0_mT", 74.0);
    pp.es_params = hamiltonian::default_params(hamiltonian::Manifold::ES).with_field(b0);
    pp.gs_params = hamiltonian::default_params(hamiltonian::Manifold::GS).with_field(b0);
    const auto at_b0 = dynamics::pump_steady_state(pp);
    std::vector<std::vector<double>> rho_rows;
    for (int m = -3; m <= 3; ++m)
        rho_rows.push_back({static_cast<double>(m), at_b0.rho[m]});
    io::write_csv(run.out_path("pump_rho.csv"), "m_I,population", rho_rows);
    run.write_manifest("pump", {"pump.csv", "pump_rho.csv"});
    if (!all_converged)
        throw CliError(internal, "nonconvergence", "pump chain hit cycles_cap");
    std::cout << "pump: P(" << io::format_double(b0)
              << " mT) = " << io::format_double(at_b0.polarization) << " -> "
              << run.out_path("pump.csv") << "\n";
}

// strongest populated nuclear line of the m_s=-1 branch, used as the default
// RF drive target
spectra::TransitionLine dominant_nuclear_line(const hamiltonian::SpinSystemParams& p) {
    const auto es = spectra::eigh(hamiltonian::build_hamiltonian(p));
    const auto v = hamiltonian::drive_operator(p);
    std::vector<double> pops(81, 0.0);
    for (int k = 0; k < es.dim(); ++k) {
        const auto& lab = es.labels[static_cast<std::size_t>(k)];
        if (lab.ms == -1 && !lab.mixed)
            pops[static_cast<std::size_t>(k)] =
                spinops::mi_multiplicity(lab.mi) / 27.0 / spinops::mi_multiplicity(lab.mi);
    }
    const auto lines = spectra::transition_catalog(es, v, {30.0, 70.0}, pops);
    const spectra::TransitionLine* best = nullptr;
    for (const auto& l : lines) {
        if (l.ms_from != -1 || l.ms_to != -1 || l.weight <= 0) continue;
        if (!best || l.strength * l.weight > best->strength * best->weight) best = &l;
    }
    if (!best) throw CliError(internal, "internal", "no nuclear line found in 30-70 MHz");
    return *best;
}

void cmd_rabi(Run& run) {
    const auto p = run.params();
    const double b1 = run.cfg.get_double("rf_b1_mT", 0.2);

    double freq;
    int initial;
    if (run.cfg.has("rf_freq_MHz") && run.cfg.has("initial_state")) {
        freq = run.cfg.get_double("rf_freq_MHz");
        initial = static_cast<int>(run.cfg.get_long("initial_state", 0));
    } else {
        const auto line = dominant_nuclear_line(p);
        freq = run.cfg.get_double("rf_freq_MHz", line.freq_mhz);
        initial = static_cast<int>(run.cfg.get_long("initial_state", line.state_i));
    }
    const auto times = grid_from_cfg(run.cfg, "time_grid_us", "0:4:0.02");

    const auto trace = dynamics::rabi_evolve(p, freq, b1, times, initial);
    io::write_timetrace_csv(run.out_path("rabi.csv"), trace);
    KeyValues extra;
    run.cfg = [&] {  // record the resolved drive in the manifest
        KeyValues c = run.cfg;
        c.set_double("rf_freq_MHz", freq);
        c.set_long("initial_state", initial);
        return c;
    }();
    run.write_manifest("rabi", {"rabi.csv"});
    std::cout << "rabi: drive " << io::format_double(freq) << " MHz at "
              << io::format_double(b1) << " mT, " << times.size() << " samples -> "
              << run.out_path("rabi.csv") << "\n";
}

void write_fit_report(const std::string& path, const KeyValues& kv) {
    kv.write_file(path);
}

void cmd_fit_odmr(Run& run, std::string input) {
    if (input.empty()) input = run.cfg.get_string("input");
    const auto p = run.params();
    const auto spec = [&] {
        try {
            return io::read_spectrum_csv(input);
        } catch (const std::exception& e) {
            throw CliError(file_io, "io", e.what());
        }
    }();
    analysis::LorentzFitOptions opts;
    opts.fix_centers = run.cfg.get_bool("fix_centers", true);
    const auto seed = analysis::seed_odmr_peaks(spec, p, run.cfg.get_double("fwhm_MHz", 12.0));
    const auto fit = analysis::fit_lorentzians(spec, seed, opts);
    if (!fit.converged)
        throw CliError(internal, "nonconvergence", "odmr fit did not converge");
    const auto rho = analysis::peaks_to_distribution(fit.peaks, p);
    const double pol = analysis::polarization(rho);

    KeyValues report;
    report.set("fit", "odmr_lorentzians");
    report.set_long("n_peaks", static_cast<long>(fit.peaks.size()));
    for (std::size_t k = 0; k < fit.peaks.size(); ++k) {
        report.set_double("center_" + std::to_string(k) + "_MHz", fit.peaks.centers_mhz[k]);
        report.set_double("amplitude_" + std::to_string(k), fit.peaks.amplitudes[k]);
    }
    report.set_double("fwhm_MHz", fit.peaks.fwhm_mhz[0]);
    report.set_double("baseline", fit.peaks.baseline);
    report.set_double("residual_rms", fit.residual_rms);
    report.set_long("iterations", fit.iterations);
    report.set_bool("converged", fit.converged);
    for (int m = -3; m <= 3; ++m)
        report.set_double("rho_" + std::to_string(m), rho[m]);
    report.set_double("polarization", pol);
    write_fit_report(run.out_path("fit_odmr_report.txt"), report);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < spec.freqs_mhz.size(); ++i)
        rows.push_back({spec.freqs_mhz[i],
                        fit.peaks.evaluate(spec.freqs_mhz[i]) - spec.intensity[i]});
    io::write_csv(run.out_path("fit_odmr_residuals.csv"), "frequency_mhz,residual", rows);
    run.cfg.set("input", input);
    run.write_manifest("fit-odmr", {"fit_odmr_report.txt", "fit_odmr_residuals.csv"});
    std::cout << "fit-odmr: polarization " << io::format_double(pol) << " -> "
              << run.out_path("fit_odmr_report.txt") << "\n";
}

// coarse DFT frequency seed for the Rabi fit
double seed_frequency(const dynamics::TimeTrace& t) {
    const std::size_t n = t.t_us.size();
    const double span = t.t_us.back() - t.t_us.front();
    double mean = 0;
    for (double y : t.population) mean += y;
    mean /= static_cast<double>(n);
    double best_f = 1.0 / span, best_p = 0;
    for (double f = 0.5 / span; f <= 0.5 * static_cast<double>(n) / span; f += 0.1 / span) {
        double re = 0, im = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 2.0 * 3.14159265358979323846 * f * t.t_us[i];
            re += (t.population[i] - mean) * std::cos(w);
            im += (t.population[i] - mean) * std::sin(w);
        }
        const double p = re * re + im * im;
        if (p > best_p) { best_p = p; best_f = f; }
    }
    return best_f;
}

void cmd_fit_rabi(Run& run, std::string input) {
    if (input.empty()) input = run.cfg.get_string("input");
    const auto trace = [&] {
        try {
            return io::read_timetrace_csv(input);
        } catch (const std::exception& e) {
            throw CliError(file_io, "io", e.what());
        }
    }();
    analysis::RabiFit init;
    init.f_rabi_mhz = run.cfg.get_double("init_f_MHz", seed_frequency(trace));
    double lo = trace.population[0], hi = trace.population[0];
    for (double y : trace.population) { lo = std::min(lo, y); hi = std::max(hi, y); }
    init.amplitude = 0.5 * (hi - lo);
    init.baseline = 0.5 * (hi + lo);

    // stage 1: plain damped cosine; stage 2 adds the extra decay terms
    analysis::RabiFitOptions stage1;
    stage1.n_extra_decays = 0;
    auto fit = analysis::fit_damped_cosine(trace, init, stage1);
    analysis::RabiFitOptions opts;
    opts.n_extra_decays = static_cast<int>(run.cfg.get_long("n_extra_decays", 1));
    if (opts.n_extra_decays > 0) {
        analysis::RabiFit seeded = fit;
        seeded.extra_decays.clear();
        const auto full = analysis::fit_damped_cosine(trace, seeded, opts);
        if (full.converged && full.residual_rms <= fit.residual_rms) fit = full;
    }
    if (!fit.converged)
        throw CliError(internal, "nonconvergence", "rabi fit did not converge");

    KeyValues report;
    report.set("fit", "damped_cosine");
    report.set_double("f_rabi_MHz", fit.f_rabi_mhz);
    report.set_double("t2_star_us", fit.t2_star_us);
    report.set_bool("t2_upper_bound", fit.t2_upper_bound);
    report.set_double("amplitude", fit.amplitude);
    report.set_double("phase_rad", fit.phase_rad);
    for (std::size_t k = 0; k < fit.extra_decays.size(); ++k) {
        report.set_double("decay_c_" + std::to_string(k), fit.extra_decays[k].first);
        report.set_double("decay_tau_" + std::to_string(k) + "_us", fit.extra_decays[k].second);
    }
    report.set_double("baseline", fit.baseline);
    report.set_double("residual_rms", fit.residual_rms);
    report.set_bool("converged", fit.converged);
    write_fit_report(run.out_path("fit_rabi_report.txt"), report);
    run.cfg.set("input", input);
    run.write_manifest("fit-rabi", {"fit_rabi_report.txt"});
    std::cout << "fit-rabi: f_rabi " << io::format_double(fit.f_rabi_mhz) << " MHz, T2* "
              << io::format_double(fit.t2_star_us) << " us -> "
              << run.out_path("fit_rabi_report.txt") << "\n";
}

void cmd_repro(const std::string& outdir) {
    auto fresh = [&](const KeyValues& overrides) {
        Run r;
        r.cfg = Defaults().kv;
        for (const auto& [k, v] : overrides.entries()) r.cfg.set(k, v);
        r.outdir = outdir;
        return r;
    };
    {
        Run r = fresh({});
        cmd_constants(r, true);
    }
    {
        KeyValues o;
        o.set("manifold", "ES");
        o.set("b_sweep_mT", "60:90:0.5");
        Run r = fresh(o);
        cmd_levels(r);
    }
    {
        KeyValues o;
        o.set("freq_grid_MHz", "1178:1578:0.25");
        Run r = fresh(o);
        cmd_odmr(r);
    }
    {
        KeyValues o;
        o.set("freq_grid_MHz", "0.25:70:0.05");
        Run r = fresh(o);
        cmd_nmr(r);
    }
    {
        KeyValues o;
        o.set("b_sweep_mT", "7:110:2");
        Run r = fresh(o);
        cmd_pump(r);
    }
    {
        KeyValues o;
        o.set("time_grid_us", "0:4:0.02");
        Run r = fresh(o);
        cmd_rabi(r);
    }
    {
        Run r = fresh({});
        cmd_fit_odmr(r, (fs::path(outdir) / "odmr.csv").string());
    }
    {
        Run r = fresh({});
        cmd_fit_rabi(r, (fs::path(outdir) / "rabi.csv").string());
    }
    std::cout << "repro: all recipes written to " << outdir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"V_B- electron/nuclear spin simulator for hBN"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, outdir = ".", input_path;
    app.add_option("--config", config_path, "flat key = value config file")->expected(1);
    app.add_option("--out", outdir, "output directory");

    // flag overrides shared across subcommands; only set keys win over the file
    std::map<std::string, std::string> overrides;
    auto add_override = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                            const std::string& help) {
        sub->add_option_function<std::string>(
               flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help)
            ->expected(1);
    };

    auto* c_const = app.add_subcommand("constants", "dump the constants table");
    auto* c_levels = app.add_subcommand("levels", "eigenvalues vs magnetic field");
    auto* c_odmr = app.add_subcommand("odmr", "seven-line hyperfine ODMR spectrum");
    auto* c_nmr = app.add_subcommand("nmr", "nuclear-transition (ODNMR) spectra");
    auto* c_pump = app.add_subcommand("pump", "optical nuclear polarization vs field");
    auto* c_rabi = app.add_subcommand("rabi", "driven population dynamics");
    auto* c_fodmr = app.add_subcommand("fit-odmr", "fit a spectrum CSV with 7 Lorentzians");
    auto* c_frabi = app.add_subcommand("fit-rabi", "fit a time trace with a damped cosine");
    auto* c_repro = app.add_subcommand("repro", "run every recipe into --out");

    for (auto* sub : {c_levels, c_odmr, c_nmr, c_pump, c_rabi, c_fodmr, c_frabi}) {
        add_override(sub, "--manifold", "manifold", "GS or ES");
        add_override(sub, "--b0-mT", "b0_mT", "static field along z, mT");
        add_override(sub, "--seed", "seed", "noise seed");
    }
    add_override(c_levels, "--b", "b_sweep_mT", "field sweep start:stop:step, mT");
    add_override(c_pump, "--b", "b_sweep_mT", "field sweep start:stop:step, mT");
    add_override(c_odmr, "--rho", "rho",
                 "uniform-multiplicity | delta:M | pumped | 7 comma values");
    add_override(c_nmr, "--rho", "rho", "population preset, as for odmr");
    add_override(c_odmr, "--fwhm-MHz", "fwhm_MHz", "line width");
    add_override(c_odmr, "--grid", "freq_grid_MHz", "frequency grid start:stop:step");
    add_override(c_nmr, "--grid", "freq_grid_MHz", "frequency grid start:stop:step");
    add_override(c_nmr, "--fwhm-MHz", "nmr_fwhm_MHz", "line width");
    add_override(c_odmr, "--noise-pct", "noise_pct", "additive gaussian noise, % of unit peak");
    add_override(c_pump, "--pump-rate", "pump_rate_per_s", "optical cycles per second");
    add_override(c_pump, "--depol-rate", "depol_rate_per_s", "depolarization events per second");
    add_override(c_rabi, "--rf-freq-MHz", "rf_freq_MHz", "drive frequency");
    add_override(c_rabi, "--rf-b1-mT", "rf_b1_mT", "drive amplitude");
    add_override(c_rabi, "--times", "time_grid_us", "output times start:stop:step, us");
    add_override(c_rabi, "--initial-state", "initial_state", "initial eigenstate index");
    add_override(c_fodmr, "--fwhm-MHz", "fwhm_MHz", "seed line width");
    add_override(c_frabi, "--init-f-MHz", "init_f_MHz", "seed Rabi frequency");
    c_fodmr->add_option("--in", input_path, "input spectrum CSV (or config key 'input')");
    c_frabi->add_option("--in", input_path, "input time trace CSV (or config key 'input')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "hbn-spinlab: error code=1 kind=usage msg=\"" << e.what() << "\"\n";
        return usage;
    }

    try {
        Run run;
        run.cfg = Defaults().kv;
        if (!config_path.empty()) {
            const auto file = [&] {
                try {
                    return KeyValues::parse_file(config_path);
                } catch (const std::runtime_error& e) {
                    throw CliError(file_io, "io", e.what());
                }
            }();
            for (const auto& [k, v] : file.entries()) run.cfg.set(k, v);
        }
        for (const auto& [k, v] : overrides) run.cfg.set(k, v);
        run.outdir = outdir;

        if (c_const->parsed()) cmd_constants(run, outdir != ".");
        else if (c_levels->parsed()) cmd_levels(run);
        else if (c_odmr->parsed()) cmd_odmr(run);
        else if (c_nmr->parsed()) cmd_nmr(run);
        else if (c_pump->parsed()) cmd_pump(run);
        else if (c_rabi->parsed()) cmd_rabi(run);
        else if (c_fodmr->parsed()) cmd_fit_odmr(run, input_path);
        else if (c_frabi->parsed()) cmd_fit_rabi(run, input_path);
        else if (c_repro->parsed()) cmd_repro(outdir);
        return ok;
    } catch (const CliError& e) {
        std::cerr << "hbn-spinlab: error code=" << e.code << " kind=" << e.kind << " msg=\""
                  << e.what() << "\"\n";
        return e.code;
    } catch (const analysis::FitFailure& e) {
        std::cerr << "hbn-spinlab: error code=4 kind=fit msg=\"" << e.what() << "\"\n";
        return fit_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "hbn-spinlab: error code=2 kind=validation msg=\"" << e.what() << "\"\n";
        return validation;
    } catch (const std::domain_error& e) {
        std::cerr << "hbn-spinlab: error code=2 kind=validation msg=\"" << e.what() << "\"\n";
        return validation;
    } catch (const std::runtime_error& e) {
        std::cerr << "hbn-spinlab: error code=3 kind=io msg=\"" << e.what() << "\"\n";
        return file_io;
    } catch (const std::exception& e) {
        std::cerr << "hbn-spinlab: error code=5 kind=internal msg=\"" << e.what() << "\"\n";
        return internal;
    }
}
