#pragma once

// Power-series kernels shared by the model expansions. Coefficient vectors are
// stored in ascending order: c[0] + c[1] z + c[2] z^2 + ...

#include <Eigen/Core>

#include <algorithm>

namespace afm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Coefficients of (1 - z)^{-exponent} up to z^m, by the recursion
/// c_j = (1 + (exponent - 1) / j) c_{j-1}, c_0 = 1.
template <typename Scalar>
Vector<Scalar> fractional_filter(Scalar exponent, Eigen::Index m) {
    Vector<Scalar> c(m + 1);
    c(0) = Scalar(1);
    for (Eigen::Index j = 1; j <= m; ++j) {
        c(j) = (Scalar(1) + (exponent - Scalar(1)) / Scalar(j)) * c(j - 1);
    }
    return c;
}

/// First m+1 coefficients of the product a(z) b(z).
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> truncated_product(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b,
                                                    Eigen::Index m) {
    using Scalar = typename DerivedA::Scalar;
    Vector<Scalar> out = Vector<Scalar>::Zero(m + 1);
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(a.size(), m + 1); ++i) {
        if (a(i) == Scalar(0)) continue;
        const Eigen::Index top = std::min<Eigen::Index>(b.size() - 1, m - i);
        for (Eigen::Index j = 0; j <= top; ++j) out(i + j) += a(i) * b(j);
    }
    return out;
}

/// First m+1 coefficients of a(z) / b(z); requires b(0) != 0.
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> truncated_quotient(const Eigen::MatrixBase<DerivedA>& a,
                                                     const Eigen::MatrixBase<DerivedB>& b,
                                                     Eigen::Index m) {
    using Scalar = typename DerivedA::Scalar;
    Vector<Scalar> out(m + 1);
    const Scalar lead = b(0);
    for (Eigen::Index j = 0; j <= m; ++j) {
        Scalar acc = j < a.size() ? a(j) : Scalar(0);
        const Eigen::Index top = std::min<Eigen::Index>(b.size() - 1, j);
        for (Eigen::Index i = 1; i <= top; ++i) acc -= b(i) * out(j - i);
        out(j) = acc / lead;
    }
    return out;
}

} // namespace afm
