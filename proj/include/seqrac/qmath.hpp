// Copyright 2026 The seqrac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * Dense 2x2 complex linear algebra and single-qubit state primitives.
 *
 * Everything here is a value type. Eigenvalue and norm computations use the
 * closed-form 2x2 expressions in terms of trace and determinant.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>

#include "seqrac/errors.hpp"

namespace seqrac {

using Complex = std::complex<double>;

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kPhaseTol = 1e-10;

/// Row-major 2x2 complex matrix.
class C2x2 {
  public:
    constexpr C2x2() = default;
    constexpr C2x2(Complex a00, Complex a01, Complex a10, Complex a11) : m_{a00, a01, a10, a11} {}

    static constexpr C2x2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr C2x2 zero() { return {}; }

    constexpr Complex operator()(std::size_t row, std::size_t col) const { return m_[2 * row + col]; }
    constexpr Complex &operator()(std::size_t row, std::size_t col) { return m_[2 * row + col]; }
    constexpr const std::array<Complex, 4> &entries() const { return m_; }

    C2x2 &operator+=(const C2x2 &o) {
        for (std::size_t k = 0; k < 4; ++k) m_[k] += o.m_[k];
        return *this;
    }
    C2x2 &operator-=(const C2x2 &o) {
        for (std::size_t k = 0; k < 4; ++k) m_[k] -= o.m_[k];
        return *this;
    }
    C2x2 &operator*=(Complex s) {
        for (auto &v : m_) v *= s;
        return *this;
    }

    friend C2x2 operator+(C2x2 a, const C2x2 &b) { return a += b; }
    friend C2x2 operator-(C2x2 a, const C2x2 &b) { return a -= b; }
    friend C2x2 operator-(C2x2 a) { return a *= -1.0; }
    friend C2x2 operator*(C2x2 a, Complex s) { return a *= s; }
    friend C2x2 operator*(Complex s, C2x2 a) { return a *= s; }
    friend C2x2 operator*(C2x2 a, double s) { return a *= Complex(s); }
    friend C2x2 operator*(double s, C2x2 a) { return a *= Complex(s); }
    friend C2x2 operator*(const C2x2 &a, const C2x2 &b) {
        return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
                a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
    }
    friend bool operator==(const C2x2 &, const C2x2 &) = default;

    C2x2 adjoint() const {
        return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
    }
    Complex trace() const { return m_[0] + m_[3]; }
    Complex det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

    /// Largest entry modulus.
    double max_abs() const {
        double r = 0.0;
        for (const auto &v : m_) r = std::max(r, std::abs(v));
        return r;
    }

    friend std::ostream &operator<<(std::ostream &os, const C2x2 &a) {
        return os << "[[" << a(0, 0) << ", " << a(0, 1) << "], [" << a(1, 0) << ", " << a(1, 1) << "]]";
    }

  private:
    std::array<Complex, 4> m_{};
};

inline double max_abs_diff(const C2x2 &a, const C2x2 &b) { return (a - b).max_abs(); }

inline bool is_hermitian(const C2x2 &a, double tol = kAlgebraTol) {
    return max_abs_diff(a, a.adjoint()) <= tol;
}

inline bool is_unitary(const C2x2 &a, double tol = kAlgebraTol) {
    return max_abs_diff(a.adjoint() * a, C2x2::identity()) <= tol;
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline std::array<double, 2> hermitian_eigenvalues(const C2x2 &a) {
    const double half_tr = 0.5 * a.trace().real();
    const double d = a.det().real();
    const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - d));
    return {half_tr - disc, half_tr + disc};
}

/// Largest singular value.
inline double operator_norm(const C2x2 &a) {
    return std::sqrt(std::max(0.0, hermitian_eigenvalues(a.adjoint() * a)[1]));
}

enum class Axis { X, Y, Z };

constexpr C2x2 pauli(Axis axis) {
    switch (axis) {
        case Axis::X:
            return {0.0, 1.0, 1.0, 0.0};
        case Axis::Y:
            return {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0};
        case Axis::Z:
            break;
    }
    return {1.0, 0.0, 0.0, -1.0};
}

/**
 * True iff a = phase * b (to within tol, max-entry norm) for some unit-modulus
 * phase. The candidate phase is read off the largest-magnitude entry of b.
 * Two all-zero matrices compare equal.
 */
inline bool equal_up_to_global_phase(const C2x2 &a, const C2x2 &b, double tol = kPhaseTol) {
    const auto &ea = a.entries();
    const auto &eb = b.entries();
    const auto k = static_cast<std::size_t>(std::distance(
        eb.begin(), std::max_element(eb.begin(), eb.end(),
                                     [](Complex l, Complex r) { return std::abs(l) < std::abs(r); })));
    if (std::abs(eb[k]) == 0.0) return a.max_abs() <= tol;
    Complex phase = 1.0;
    if (std::abs(ea[k]) > 0.0) phase = (ea[k] / std::abs(ea[k])) * (std::conj(eb[k]) / std::abs(eb[k]));
    return max_abs_diff(a, phase * b) <= tol;
}

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    BlochVector scaled(double s) const { return {s * x, s * y, s * z}; }
};

/**
 * Qubit density matrix: Hermitian, unit trace, positive semidefinite.
 * The checked factory enforces all three to kAlgebraTol.
 */
class DensityMatrix {
  public:
    /// The maximally mixed state.
    DensityMatrix() : m_(0.5 * C2x2::identity()) {}

    static DensityMatrix from_matrix(const C2x2 &m, double tol = kAlgebraTol) {
        if (!is_hermitian(m, tol)) throw DomainError("density matrix is not Hermitian");
        if (std::abs(m.trace() - 1.0) > tol) throw DomainError("density matrix trace is not 1");
        if (hermitian_eigenvalues(m)[0] < -tol) throw DomainError("density matrix has a negative eigenvalue");
        return DensityMatrix(m);
    }

    /// Hermitizes and divides by the trace. Caller guarantees positivity.
    static DensityMatrix from_unnormalized(const C2x2 &m) {
        C2x2 h = 0.5 * (m + m.adjoint());
        return DensityMatrix(h * (1.0 / h.trace().real()));
    }

    static DensityMatrix from_bloch(const BlochVector &r) {
        if (r.norm() > 1.0 + kAlgebraTol) throw DomainError("Bloch vector longer than 1");
        return DensityMatrix(0.5 * (C2x2::identity() + r.x * pauli(Axis::X) + r.y * pauli(Axis::Y) +
                                    r.z * pauli(Axis::Z)));
    }

    const C2x2 &matrix() const { return m_; }
    double purity() const { return (m_ * m_).trace().real(); }

  private:
    explicit DensityMatrix(const C2x2 &m) : m_(m) {}
    C2x2 m_;
};

/// r_k = tr(rho sigma_k). Throws if any component has an imaginary part above 1e-9.
inline BlochVector to_bloch(const DensityMatrix &rho) {
    auto component = [&](Axis axis) {
        const Complex v = (rho.matrix() * pauli(axis)).trace();
        if (std::abs(v.imag()) > 1e-9) throw DomainError("corrupted state: complex Bloch component");
        return v.real();
    };
    return {component(Axis::X), component(Axis::Y), component(Axis::Z)};
}

/// tr(A rho), real part.
inline double expectation(const C2x2 &op, const DensityMatrix &rho) { return (op * rho.matrix()).trace().real(); }

}  // namespace seqrac
