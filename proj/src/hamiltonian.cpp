#include "hbnspin/hamiltonian.hpp"

namespace hbnspin::hamiltonian {

using spinops::Matrix;
using spinops::Operator;

namespace {

struct SiteOps {
    std::array<Operator, 3> s;  // x, y, z on the given site, lifted to 81 dims
};

SiteOps lifted_spin1(int site) {
    const auto [sx, sy, sz] = spinops::spin1_operators();
    return {{spinops::embed(sx, site), spinops::embed(sy, site), spinops::embed(sz, site)}};
}

}  // namespace

Operator build_hamiltonian(const SpinSystemParams& p) {
    p.validate();
    const auto e = lifted_spin1(0);
    const Operator id81 = spinops::identity(81);

    Matrix h = (p.d_zfs_mhz * (e.s[2] * e.s[2] - (2.0 / 3.0) * id81)).entries();
    h += (p.gamma_e_mhz_per_mt * p.b0_mt * e.s[2]).entries();

    for (int j = 0; j < 3; ++j) {
        const auto n = lifted_spin1(j + 1);
        const auto& a = p.hyperfine[static_cast<std::size_t>(j)].a;
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) {
                const double c = a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
                if (c != 0.0) h += c * (e.s[u] * n.s[v]).entries();
            }
        h -= (p.gamma_n_mhz_per_mt * p.b0_mt * n.s[2]).entries();
        const double q = p.quadrupole_mhz[static_cast<std::size_t>(j)];
        if (q != 0.0) h += (q * (n.s[2] * n.s[2] - (2.0 / 3.0) * id81)).entries();
    }
    return Operator(std::move(h));
}

Operator transverse_hyperfine(const SpinSystemParams& p) {
    const auto e = lifted_spin1(0);
    Matrix h = Matrix::Zero(81, 81);
    for (int j = 0; j < 3; ++j) {
        const auto n = lifted_spin1(j + 1);
        const auto& a = p.hyperfine[static_cast<std::size_t>(j)].a;
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) {
                if (u == 2 && v == 2) continue;  // the axial Sz Iz term is diagonal
                const double c = a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
                if (c != 0.0) h += c * (e.s[u] * n.s[v]).entries();
            }
    }
    return Operator(std::move(h));
}

Operator drive_operator(const SpinSystemParams& p, DriveKind) {
    const auto [sx, sy, sz] = spinops::spin1_operators();
    Matrix v = (p.gamma_e_mhz_per_mt * spinops::embed(sx, 0)).entries();
    for (int j = 1; j <= 3; ++j)
        v += (p.gamma_n_mhz_per_mt * spinops::embed(sx, j)).entries();
    return Operator(std::move(v));
}

}  // namespace hbnspin::hamiltonian
