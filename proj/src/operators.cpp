#include "hbnspin/operators.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

namespace hbnspin::spinops {

Operator::Operator(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols())
        throw std::invalid_argument("Operator: matrix must be square");
}

double Operator::max_abs() const {
    return mat_.size() == 0 ? 0.0 : mat_.cwiseAbs().maxCoeff();
}

bool Operator::is_hermitian() const {
    const double tol = 1e-9 * (1.0 + max_abs());
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Spin1Triple spin1_operators() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix sx = Matrix::Zero(3, 3);
    sx(0, 1) = s; sx(1, 0) = s;
    sx(1, 2) = s; sx(2, 1) = s;
    Matrix sy = Matrix::Zero(3, 3);
    sy(0, 1) = Complex(0, -s); sy(1, 0) = Complex(0, s);
    sy(1, 2) = Complex(0, -s); sy(2, 1) = Complex(0, s);
    Matrix sz = Matrix::Zero(3, 3);
    sz(0, 0) = 1.0; sz(2, 2) = -1.0;
    return {Operator(sx), Operator(sy), Operator(sz)};
}

Operator identity(int dim) {
    return Operator(Matrix::Identity(dim, dim));
}

Operator kron(const Operator& a, const Operator& b) {
    return Operator(Eigen::kroneckerProduct(a.entries(), b.entries()).eval());
}

Operator embed(const Operator& op, int site, const SiteLayout& layout) {
    if (site < 0 || site >= layout.n_sites)
        throw std::out_of_range("embed: site index out of range");
    if (op.dim() != layout.site_dims[static_cast<std::size_t>(site)])
        throw std::invalid_argument("embed: operator dimension does not match site");
    Operator out = (site == 0) ? op : identity(layout.site_dims[0]);
    for (int s = 1; s < layout.n_sites; ++s)
        out = kron(out, (s == site) ? op : identity(layout.site_dims[static_cast<std::size_t>(s)]));
    return out;
}

namespace {

// m value of local basis index (0,1,2) -> (+1,0,-1)
int local_m(int idx) { return 1 - idx; }

std::array<int, 81> make_total_mi() {
    std::array<int, 81> out{};
    for (int i = 0; i < 81; ++i) {
        int r = i % 27;
        out[static_cast<std::size_t>(i)] =
            local_m(r / 9) + local_m((r / 3) % 3) + local_m(r % 3);
    }
    return out;
}

std::array<int, 81> make_ms() {
    std::array<int, 81> out{};
    for (int i = 0; i < 81; ++i) out[static_cast<std::size_t>(i)] = local_m(i / 27);
    return out;
}

}  // namespace

const std::array<int, 81>& basis_total_mi() {
    static const std::array<int, 81> table = make_total_mi();
    return table;
}

const std::array<int, 81>& basis_ms() {
    static const std::array<int, 81> table = make_ms();
    return table;
}

int mi_multiplicity(int m_i) {
    static constexpr std::array<int, 7> mult{1, 3, 6, 7, 6, 3, 1};
    if (m_i < -3 || m_i > 3) throw std::out_of_range("mi_multiplicity: m_I out of -3..3");
    return mult[static_cast<std::size_t>(m_i + 3)];
}

}  // namespace hbnspin::spinops
