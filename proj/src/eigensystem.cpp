#include "hbnspin/eigensystem.hpp"

#include <cmath>
#include <stdexcept>

namespace hbnspin::spectra {

using spinops::Matrix;

double EigenSystem::branch_weight(int k, int ms) const {
    const auto& ms_table = spinops::basis_ms();
    double w = 0.0;
    for (int i = 0; i < vectors.rows(); ++i)
        if (ms_table[static_cast<std::size_t>(i)] == ms)
            w += std::norm(vectors(i, k));
    return w;
}

std::vector<int> EigenSystem::branch_indices(int ms) const {
    std::vector<int> out;
    for (int k = 0; k < dim(); ++k)
        if (labels[static_cast<std::size_t>(k)].ms == ms &&
            !labels[static_cast<std::size_t>(k)].mixed)
            out.push_back(k);
    return out;
}

namespace {

StateLabel label_column(const Matrix& vecs, int k) {
    const auto& ms_table = spinops::basis_ms();
    const auto& mi_table = spinops::basis_total_mi();
    double wms[3] = {0, 0, 0};   // index: m_s = +1, 0, -1
    double wmi[7] = {0, 0, 0, 0, 0, 0, 0};
    for (int i = 0; i < vecs.rows(); ++i) {
        const double w = std::norm(vecs(i, k));
        wms[1 - ms_table[static_cast<std::size_t>(i)]] += w;
        wmi[mi_table[static_cast<std::size_t>(i)] + 3] += w;
    }
    StateLabel lab;
    int best_ms = 0;
    for (int b = 1; b < 3; ++b)
        if (wms[b] > wms[best_ms]) best_ms = b;
    lab.ms = 1 - best_ms;
    lab.ms_weight = wms[best_ms];
    lab.mixed = !(lab.ms_weight > 0.5);
    int best_mi = 0;
    for (int b = 1; b < 7; ++b)
        if (wmi[b] > wmi[best_mi]) best_mi = b;
    lab.mi = best_mi - 3;
    lab.mi_weight = wmi[best_mi];
    return lab;
}

}  // namespace

EigenSystem eigh(const spinops::Operator& h) {
    if (!h.is_hermitian())
        throw std::invalid_argument("eigh: operator is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigensolver did not converge");

    EigenSystem es;
    const int n = h.dim();
    es.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) es.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    es.vectors = solver.eigenvectors();

    // phase fix: first component above 1e-12 of the column max made real positive
    for (int k = 0; k < n; ++k) {
        const double colmax = es.vectors.col(k).cwiseAbs().maxCoeff();
        for (int i = 0; i < n; ++i) {
            const auto v = es.vectors(i, k);
            if (std::abs(v) > 1e-12 * colmax) {
                es.vectors.col(k) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }

    es.labels.reserve(static_cast<std::size_t>(n));
    if (n == 81) {
        for (int k = 0; k < n; ++k) es.labels.push_back(label_column(es.vectors, k));
    } else {
        es.labels.assign(static_cast<std::size_t>(n), StateLabel{});
    }
    return es;
}

}  // namespace hbnspin::spectra
