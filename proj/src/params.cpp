#include "hbnspin/params.hpp"

#include "hbnspin/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace hbnspin::hamiltonian {

std::string to_string(Manifold m) {
    return m == Manifold::GS ? "GS" : "ES";
}

Manifold manifold_from_string(const std::string& s) {
    if (s == "GS" || s == "gs") return Manifold::GS;
    if (s == "ES" || s == "es") return Manifold::ES;
    throw std::invalid_argument("manifold must be GS or ES, got '" + s + "'");
}

HyperfineTensor HyperfineTensor::diagonal(double axx, double ayy, double azz) {
    HyperfineTensor t;
    t.a[0][0] = axx;
    t.a[1][1] = ayy;
    t.a[2][2] = azz;
    return t;
}

bool HyperfineTensor::is_symmetric(double tol) const {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                         a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) > tol)
                return false;
    return true;
}

void SpinSystemParams::validate() const {
    if (!(d_zfs_mhz > 0.0))
        throw std::invalid_argument("params: d_zfs_MHz must be > 0");
    if (!(gamma_e_mhz_per_mt > 0.0))
        throw std::invalid_argument("params: gamma_e_MHz_per_mT must be > 0");
    if (!(gamma_n_mhz_per_mt > 0.0))
        throw std::invalid_argument("params: gamma_n_MHz_per_mT must be > 0");
    if (!(b0_mt >= 0.0))
        throw std::invalid_argument("params: b0_mT must be >= 0");
    for (const auto& t : hyperfine) {
        if (!t.is_symmetric())
            throw std::invalid_argument("params: hyperfine tensor must be symmetric");
        for (const auto& row : t.a)
            for (double v : row)
                if (!std::isfinite(v))
                    throw std::invalid_argument("params: hyperfine tensor entries must be finite");
    }
    for (double q : quadrupole_mhz)
        if (!std::isfinite(q))
            throw std::invalid_argument("params: quadrupole constants must be finite");
}

SpinSystemParams SpinSystemParams::with_field(double b_mt) const {
    SpinSystemParams p = *this;
    p.b0_mt = b_mt;
    return p;
}

SpinSystemParams SpinSystemParams::without_hyperfine() const {
    SpinSystemParams p = *this;
    for (auto& t : p.hyperfine) t = HyperfineTensor{};
    return p;
}

SpinSystemParams default_params(Manifold m) {
    namespace k = hbnspin::constants;
    SpinSystemParams p;
    p.manifold = m;
    p.d_zfs_mhz = (m == Manifold::GS) ? k::d_gs_mhz : k::d_es_mhz;
    const auto tensor =
        HyperfineTensor::diagonal(k::a_tran_mhz, k::a_tran_mhz, k::a_zz_mhz);
    p.hyperfine = {tensor, tensor, tensor};
    p.gamma_e_mhz_per_mt = k::gamma_e_mhz_per_mt;
    p.gamma_n_mhz_per_mt = k::gamma_n_mhz_per_mt;
    p.quadrupole_mhz = {0.0, 0.0, 0.0};
    p.b0_mt = 0.0;
    return p;
}

}  // namespace hbnspin::hamiltonian
