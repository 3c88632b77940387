#ifndef HBNSPIN_OPERATORS_HPP
#define HBNSPIN_OPERATORS_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstddef>

// Spin-1 operator algebra and composition of the 81-dimensional Hilbert space
// electron(3) x N1(3) x N2(3) x N3(3).  Basis order per site is (m=+1, 0, -1);
// site order is (electron, N1, N2, N3).  Operators are immutable values and
// all functions here are pure.

namespace hbnspin::spinops {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Dense complex square matrix.  When an operator represents H/h its entries
/// are in MHz.
class Operator {
  public:
    Operator() = default;
    explicit Operator(Matrix m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& entries() const { return mat_; }
    Complex operator()(int i, int j) const { return mat_(i, j); }

    /// max |m_ij - conj(m_ji)| <= 1e-9 * (1 + max|m_ij|)
    bool is_hermitian() const;
    double max_abs() const;

    Operator operator+(const Operator& o) const { return Operator(mat_ + o.mat_); }
    Operator operator-(const Operator& o) const { return Operator(mat_ - o.mat_); }
    Operator operator*(const Operator& o) const { return Operator(mat_ * o.mat_); }
    friend Operator operator*(double s, const Operator& o) { return Operator(s * o.mat_); }

  private:
    Matrix mat_;
};

/// Fixed layout of the composite space: [electron, N1, N2, N3], each dim 3.
struct SiteLayout {
    static constexpr int n_sites = 4;
    static constexpr std::array<int, 4> site_dims{3, 3, 3, 3};
    static constexpr int total_dim = 81;
    static constexpr int electron_site = 0;
};

struct Spin1Triple {
    Operator sx, sy, sz;
};

/// Standard spin-1 matrices in the basis (m=+1, 0, -1); Sz diagonal.
Spin1Triple spin1_operators();

Operator identity(int dim);

/// Kronecker product; dim = a.dim * b.dim.
Operator kron(const Operator& a, const Operator& b);

/// Lift a 3x3 single-site operator to the full 81-dim space, identity on the
/// other sites.  site must be in [0, 3] and op.dim must match the site dim.
Operator embed(const Operator& op, int site, const SiteLayout& layout = {});

/// Total nuclear z-projection m_I of each of the 81 product basis states.
const std::array<int, 81>& basis_total_mi();

/// Electron m_s of each of the 81 product basis states (+1, 0 or -1).
const std::array<int, 81>& basis_ms();

/// Number of 3-nucleus product states with total projection m_I (m_I in -3..3):
/// 1, 3, 6, 7, 6, 3, 1.
int mi_multiplicity(int m_i);

}  // namespace hbnspin::spinops

#endif
