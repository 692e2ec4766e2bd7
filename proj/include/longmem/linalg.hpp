#pragma once
// Small dense solves (LU with partial pivoting). Every system in this
// project is tiny: the weight system is (m+3) x (m+3) with m <= 8, the GLS
// cross-product is (2+r) x (2+r).

#include <stdexcept>
#include <vector>

#include "longmem/errors.hpp"

namespace longmem::linalg {

using longmem::numerical_error;

// Row-major dense matrix, minimal surface.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Solves A x = b. Throws numerical_error (with a crude condition estimate in
// the message) if a pivot is numerically zero. A is copied.
std::vector<double> lu_solve(Matrix A, std::vector<double> b);

// Determinant by LU; returns 0.0 when a pivot vanishes exactly.
double determinant(Matrix A);

} // namespace longmem::linalg
