#include "longmem/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace longmem::linalg {

namespace {

// In-place LU with partial pivoting. Returns the permutation sign, records
// max/min pivot magnitudes for diagnostics. Throws on a vanishing pivot when
// `strict` is set.
int lu_factor(Matrix& A, std::vector<std::size_t>& perm, double* max_piv,
              double* min_piv, bool strict) {
    const std::size_t n = A.rows;
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    int sign = 1;
    double maxp = 0.0, minp = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(A(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(A(i, k)) > best) {
                best = std::abs(A(i, k));
                p = i;
            }
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A.a[k * n + j], A.a[p * n + j]);
            std::swap(perm[k], perm[p]);
            sign = -sign;
        }
        const double piv = A(k, k);
        maxp = std::max(maxp, std::abs(piv));
        minp = std::min(minp, std::abs(piv));
        if (std::abs(piv) < 1e-300) {
            if (strict)
                throw numerical_error(
                    "lu_solve: singular matrix (pivot " + std::to_string(piv) +
                    " at step " + std::to_string(k) +
                    ", pivot ratio " + std::to_string(maxp / (minp > 0 ? minp : 1e-300)) + ")");
            minp = 0.0;
            continue;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A(i, k) / piv;
            A(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    if (max_piv) *max_piv = maxp;
    if (min_piv) *min_piv = minp;
    return sign;
}

} // namespace

std::vector<double> lu_solve(Matrix A, std::vector<double> b) {
    const std::size_t n = A.rows;
    if (A.cols != n || b.size() != n)
        throw std::invalid_argument("lu_solve: dimension mismatch");
    std::vector<std::size_t> perm;
    lu_factor(A, perm, nullptr, nullptr, /*strict=*/true);

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= A(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= A(ii, j) * x[j];
        x[ii] /= A(ii, ii);
    }
    return x;
}

double determinant(Matrix A) {
    const std::size_t n = A.rows;
    if (A.cols != n) throw std::invalid_argument("determinant: matrix not square");
    if (n == 0) return 1.0;
    std::vector<std::size_t> perm;
    double maxp = 0.0, minp = 0.0;
    const int sign = lu_factor(A, perm, &maxp, &minp, /*strict=*/false);
    if (minp == 0.0) return 0.0;
    double det = sign;
    for (std::size_t k = 0; k < n; ++k) det *= A(k, k);
    return det;
}

} // namespace longmem::linalg
