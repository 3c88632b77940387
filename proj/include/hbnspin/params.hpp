#ifndef HBNSPIN_PARAMS_HPP
#define HBNSPIN_PARAMS_HPP

#include <array>
#include <string>

namespace hbnspin::hamiltonian {

enum class Manifold { GS, ES };

std::string to_string(Manifold m);
Manifold manifold_from_string(const std::string& s);

/// Symmetric 3x3 hyperfine coupling tensor in MHz, axes ordered (x, y, z).
struct HyperfineTensor {
    std::array<std::array<double, 3>, 3> a{};

    static HyperfineTensor diagonal(double axx, double ayy, double azz);
    double a_tran() const { return 0.5 * (a[0][0] + a[1][1]); }
    double a_zz() const { return a[2][2]; }
    bool is_symmetric(double tol = 1e-9) const;
};

/// All physical inputs of the spin Hamiltonian for one orbital manifold.
/// The static field b0 points along z (perpendicular to the hBN sheet);
/// off-axis fields are not representable by design.
struct SpinSystemParams {
    Manifold manifold = Manifold::GS;
    double d_zfs_mhz = 0.0;
    std::array<HyperfineTensor, 3> hyperfine{};
    double gamma_e_mhz_per_mt = 0.0;
    double gamma_n_mhz_per_mt = 0.0;
    std::array<double, 3> quadrupole_mhz{0.0, 0.0, 0.0};
    double b0_mt = 0.0;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    SpinSystemParams with_field(double b_mt) const;
    /// Same parameters with all three hyperfine tensors zeroed.
    SpinSystemParams without_hyperfine() const;
    double a_tran() const { return hyperfine[0].a_tran(); }
    double a_zz() const { return hyperfine[0].a_zz(); }
};

/// Defaults loaded from the constants table: D per manifold, identical axial
/// tensors diag(A_tran, A_tran, A_zz) on all three nitrogens, quadrupole 0
/// (config-settable), b0 = 0.
SpinSystemParams default_params(Manifold m);

}  // namespace hbnspin::hamiltonian

#endif
