#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quiverhk/errors.hpp"

namespace quiverhk {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// Small generic helpers
// ---------------------------------------------------------------------------

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* who)
{
    if (m.rows() != m.cols())
        throw ShapeError(std::string(who) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            auto z = m(i, j);
            if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z)))
                return false;
        }
    return true;
}

// M - (tr M / n) I
template <typename Derived>
DenseMatrix<typename Derived::Scalar> trace_free(const Eigen::MatrixBase<Derived>& m)
{
    require_square(m, "trace_free");
    DenseMatrix<typename Derived::Scalar> out = m;
    const Eigen::Index n = m.rows();
    if (n == 0)
        return out;
    const typename Derived::Scalar shift = m.trace() / static_cast<double>(n);
    out.diagonal().array() -= shift;
    return out;
}

// Spectral norm.  Cheap enough at the sizes used here.
template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<DenseMatrix<typename Derived::Scalar>> svd(m);
    return svd.singularValues()(0);
}

inline double rel_threshold(double tol, double norm) { return tol * std::max(1.0, norm); }

// ---------------------------------------------------------------------------
// Subsets and Plücker coordinates
// ---------------------------------------------------------------------------

long binomial(int n, int k);

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k);

// Position of a sorted k-subset of {0..n-1} in the lexicographic listing.
long subset_index(const std::vector<int>& subset, int n);

template <typename Derived>
typename Derived::Scalar minor_of(const Eigen::MatrixBase<Derived>& m,
                                  const std::vector<int>& rows,
                                  const std::vector<int>& cols)
{
    using S = typename Derived::Scalar;
    const int k = static_cast<int>(rows.size());
    if (k == 0)
        return S(1);
    DenseMatrix<S> sub(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            sub(a, b) = m(rows[a], cols[b]);
    if (k == 1)
        return sub(0, 0);
    return Eigen::PartialPivLU<DenseMatrix<S>>(sub).determinant();
}

// Vector of j x j minors of an n x j matrix, indexed by row subsets.
template <typename Derived>
DenseVector<typename Derived::Scalar> plucker(const Eigen::MatrixBase<Derived>& m)
{
    const int n = static_cast<int>(m.rows());
    const int j = static_cast<int>(m.cols());
    if (j > n)
        throw ShapeError("plucker: more columns (" + std::to_string(j) + ") than rows (" +
                         std::to_string(n) + ")");
    std::vector<int> all_cols(j);
    for (int c = 0; c < j; ++c)
        all_cols[c] = c;
    const auto rows = subsets(n, j);
    DenseVector<typename Derived::Scalar> out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        out(static_cast<Eigen::Index>(r)) = minor_of(m, rows[r], all_cols);
    return out;
}

// Plücker covector of a j x n matrix (minors indexed by column subsets).
template <typename Derived>
DenseVector<typename Derived::Scalar> plucker_covector(const Eigen::MatrixBase<Derived>& m)
{
    return plucker(m.transpose());
}

// The j-th compound matrix: entry (I, J) is the minor on rows I, columns J.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> minor_matrix(const Eigen::MatrixBase<Derived>& m, int j)
{
    const int r = static_cast<int>(m.rows());
    const int c = static_cast<int>(m.cols());
    if (j < 0 || j > r || j > c)
        throw ShapeError("minor_matrix: order " + std::to_string(j) + " out of range");
    const auto rs = subsets(r, j);
    const auto cs = subsets(c, j);
    DenseMatrix<typename Derived::Scalar> out(rs.size(), cs.size());
    for (std::size_t a = 0; a < rs.size(); ++a)
        for (std::size_t b = 0; b < cs.size(); ++b)
            out(a, b) = minor_of(m, rs[a], cs[b]);
    return out;
}

// omega ^ x for omega in Λ^j C^n and x in C^n, in lexicographic coordinates.
template <typename DerivedW, typename DerivedX>
DenseVector<typename DerivedW::Scalar> wedge_vector(const Eigen::MatrixBase<DerivedW>& omega,
                                                    int j,
                                                    const Eigen::MatrixBase<DerivedX>& x)
{
    using S = typename DerivedW::Scalar;
    const int n = static_cast<int>(x.size());
    if (omega.size() != binomial(n, j))
        throw ShapeError("wedge_vector: omega has the wrong length");
    DenseVector<S> out = DenseVector<S>::Zero(binomial(n, j + 1));
    if (j + 1 > n)
        return out;
    const auto targets = subsets(n, j + 1);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& s = targets[t];
        S acc(0);
        for (int p = 0; p <= j; ++p) {
            std::vector<int> rest;
            rest.reserve(j);
            for (int q = 0; q <= j; ++q)
                if (q != p)
                    rest.push_back(s[q]);
            // moving x_{s_p} to the end passes the (j - p) larger indices
            const double sign = ((j - p) % 2 == 0) ? 1.0 : -1.0;
            acc += sign * omega(subset_index(rest, n)) * x(s[p]);
        }
        out(static_cast<Eigen::Index>(t)) = acc;
    }
    return out;
}

// Matrix of the linear map x -> omega ^ x (C^n -> Λ^{j+1} C^n).
template <typename Derived>
DenseMatrix<typename Derived::Scalar> wedge_map(const Eigen::MatrixBase<Derived>& omega, int j, int n)
{
    using S = typename Derived::Scalar;
    DenseMatrix<S> out(binomial(n, j + 1), n);
    for (int c = 0; c < n; ++c) {
        DenseVector<S> e = DenseVector<S>::Zero(n);
        e(c) = S(1);
        out.col(c) = wedge_vector(omega, j, e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rank, kernels, Jordan structure
// ---------------------------------------------------------------------------

// Number of singular values above threshold.
int numeric_rank(const CMatrix& m, double threshold);

// Orthonormal basis of the numerical kernel (columns).
CMatrix null_space(const CMatrix& m, double threshold);

// Orthonormal basis of the column space (columns).
CMatrix range_space(const CMatrix& m, double threshold);

struct JordanStructure {
    std::vector<cplx> eigenvalues;
    std::vector<std::vector<int>> partitions;
    double cluster_radius = 0.0;  // widest link used while clustering

    int multiplicity(std::size_t k) const;
    int dimension() const;
};

JordanStructure jordan_type(const CMatrix& m, double tol = 1e-8);

// Largest modulus among the staircase-validated eigenvalue clusters.
double clustered_spectral_radius(const CMatrix& m, double tol = 1e-8);

struct Triangularization {
    CMatrix U;
    CMatrix T;               // strictly upper triangular (lower part zeroed)
    double lower_residual;   // largest discarded |T_ij|, i >= j
};

Triangularization strict_upper_triangularize(const CMatrix& x, double tol = 1e-8);

CMatrix upper_sqrt(const CMatrix& m);

// exp(t H) for Hermitian H.
CMatrix hermitian_exp(const CMatrix& h, double t);

// ---------------------------------------------------------------------------
// Random draws
// ---------------------------------------------------------------------------

// Entries (x + iy)/sqrt(2) with x, y standard normal.
CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng);
cplx random_complex_scalar(Rng& rng);
double random_uniform(Rng& rng, double lo, double hi);

// Haar-distributed unitary.
CMatrix haar_unitary(int n, Rng& rng);

// Haar unitary with unit determinant.
CMatrix haar_special_unitary(int n, Rng& rng);

// Random unit pair (u, v).
std::pair<cplx, cplx> random_su2(Rng& rng);

}  // namespace quiverhk
