#include "unitrace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "unitrace/errors.hpp"

namespace unitrace {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()), data_() {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw DimensionMismatchError("ComplexMatrix: rows must form a square matrix");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> entries) {
    ComplexMatrix m(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

CVector ComplexMatrix::column(std::size_t j) const {
    CVector v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = (*this)(i, j);
    return v;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const Complex> v) {
    for (std::size_t i = 0; i < dim_; ++i) (*this)(i, j) = v[i];
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (other.dim_ != dim_) throw DimensionMismatchError("matrix addition: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (other.dim_ != dim_) throw DimensionMismatchError("matrix subtraction: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (auto& z : data_) z *= scale;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.dim();
    if (b.dim() != n) {
        throw DimensionMismatchError("matmul: " + std::to_string(n) + "x" + std::to_string(n) +
                                     " times " + std::to_string(b.dim()) + "x" +
                                     std::to_string(b.dim()));
    }
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

CVector matvec(const ComplexMatrix& a, std::span<const Complex> v) {
    const std::size_t n = a.dim();
    if (v.size() != n) throw DimensionMismatchError("matvec: dimension mismatch");
    CVector r(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw DimensionMismatchError("inner: dimension mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Complex expectation(std::span<const Complex> v, const ComplexMatrix& m) {
    const CVector mv = matvec(m, v);
    return inner(v, mv);
}

double unitarity_defect(const ComplexMatrix& u) {
    return (matmul(u.adjoint(), u) - ComplexMatrix::identity(u.dim())).frobenius_norm();
}

double hermiticity_defect(const ComplexMatrix& h) { return (h - h.adjoint()).frobenius_norm(); }

Complex determinant(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    ComplexMatrix lu = a;
    Complex det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                piv = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            det = -det;
        }
        const Complex p = lu(k, k);
        det *= p;
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = lu(i, k) / p;
            if (f == Complex{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return det;
}

namespace {

// LU with full pivoting: P m Q = L U. The multipliers of L are stored below
// the diagonal of `lu`.
struct FullPivotLU {
    ComplexMatrix lu;
    std::vector<std::size_t> row_perm;  // row k of PmQ is row row_perm[k] of m
    std::vector<std::size_t> col_perm;  // column k of PmQ is column col_perm[k] of m
};

FullPivotLU full_pivot_lu(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    FullPivotLU f{m, std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
    std::iota(f.row_perm.begin(), f.row_perm.end(), 0);
    std::iota(f.col_perm.begin(), f.col_perm.end(), 0);
    auto& a = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        double best = -1.0;
        for (std::size_t i = k; i < n; ++i) {
            for (std::size_t j = k; j < n; ++j) {
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pr = i;
                    pc = j;
                }
            }
        }
        if (pr != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
            std::swap(f.row_perm[k], f.row_perm[pr]);
        }
        if (pc != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, pc));
            std::swap(f.col_perm[k], f.col_perm[pc]);
        }
        const Complex p = a(k, k);
        if (p == Complex{}) continue;
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex mult = a(i, k) / p;
            a(i, k) = mult;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= mult * a(k, j);
        }
    }
    return f;
}

void normalize_in_place(CVector& v) {
    const double nv = norm2(v);
    for (auto& z : v) z /= nv;
}

void fix_global_phase(CVector& v) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    const double mag = std::abs(v[imax]);
    if (mag == 0.0) return;
    const Complex rot = std::conj(v[imax]) / mag;
    for (auto& z : v) z *= rot;
    v[imax] = Complex(std::abs(v[imax]), 0.0);
}

}  // namespace

CVector nullspace_vector(const ComplexMatrix& m, std::optional<double> tol) {
    const std::size_t n = m.dim();
    if (n == 0) throw DimensionMismatchError("nullspace_vector: empty matrix");
    if (!m.all_finite()) throw NumericalError("nullspace_vector: non-finite entries");
    const double norm_m = m.frobenius_norm();
    const double t = tol.value_or(1e-8 * std::max(norm_m, 1.0));

    const FullPivotLU f = full_pivot_lu(m);
    int nullity = 0;
    std::size_t free_index = n - 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(f.lu(k, k)) <= t) {
            ++nullity;
            free_index = k;
        }
    }
    if (nullity != 1) {
        throw RankDeficiencyError("nullspace_vector: nullity " + std::to_string(nullity) +
                                      " at tolerance " + num(t) + " (expected 1)",
                                  nullity);
    }

    // Back-substitute U y = 0 with the free coordinate set to one.
    CVector y(n);
    y[free_index] = 1.0;
    for (std::size_t ii = free_index; ii-- > 0;) {
        Complex s = 0.0;
        for (std::size_t j = ii + 1; j <= free_index; ++j) s += f.lu(ii, j) * y[j];
        y[ii] = -s / f.lu(ii, ii);
    }
    CVector x(n);
    for (std::size_t k = 0; k < n; ++k) x[f.col_perm[k]] = y[k];
    normalize_in_place(x);

    // One step of inverse iteration with the singular pivot regularized.
    if (free_index == n - 1 && n > 1) {
        const double floor = std::max(norm_m, 1.0) * std::numeric_limits<double>::epsilon();
        CVector z(n);
        for (std::size_t k = 0; k < n; ++k) z[k] = x[f.row_perm[k]];
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) z[i] -= f.lu(i, j) * z[j];
        for (std::size_t ii = n; ii-- > 0;) {
            Complex s = z[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * z[j];
            Complex p = f.lu(ii, ii);
            if (std::abs(p) < floor) p = (p == Complex{}) ? Complex(floor, 0.0) : p / std::abs(p) * floor;
            z[ii] = s / p;
        }
        CVector refined(n);
        for (std::size_t k = 0; k < n; ++k) refined[f.col_perm[k]] = z[k];
        if (std::isfinite(norm2(refined)) && norm2(refined) > 0.0) {
            normalize_in_place(refined);
            if (norm2(matvec(m, refined)) <= norm2(matvec(m, x))) x = std::move(refined);
        }
    }
    fix_global_phase(x);
    if (norm2(matvec(m, x)) > 10.0 * t && norm_m > 0.0) {
        throw NumericalError("nullspace_vector: residual exceeds 10*tol");
    }
    return x;
}

HermitianEigen eig_hermitian(const ComplexMatrix& h) {
    const std::size_t n = h.dim();
    ComplexMatrix a = 0.5 * (h + h.adjoint());
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());

    auto rotate_columns = [n](ComplexMatrix& x, std::size_t p, std::size_t q, Complex j00,
                              Complex j01, Complex j10, Complex j11) {
        for (std::size_t r = 0; r < n; ++r) {
            const Complex xp = x(r, p), xq = x(r, q);
            x(r, p) = xp * j00 + xq * j10;
            x(r, q) = xp * j01 + xq * j11;
        }
    };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-17 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const Complex e = apq / mag;
                const double theta = (aqq - app) / (2.0 * mag);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = diag(1, conj(e)) * [[c, s], [-s, c]] acting on (p, q).
                const Complex j00 = c, j01 = s, j10 = -s * std::conj(e), j11 = c * std::conj(e);
                rotate_columns(a, p, q, j00, j01, j10, j11);
                for (std::size_t col = 0; col < n; ++col) {
                    const Complex xp = a(p, col), xq = a(q, col);
                    a(p, col) = std::conj(j00) * xp + std::conj(j10) * xq;
                    a(q, col) = std::conj(j01) * xp + std::conj(j11) * xq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                rotate_columns(v, p, q, j00, j01, j10, j11);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    HermitianEigen out{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

namespace {

// Columns of `basis` (n x m stored as a vector of columns).
using Basis = std::vector<CVector>;

ComplexMatrix restrict_to(const Basis& w, const ComplexMatrix& op) {
    const std::size_t m = w.size();
    ComplexMatrix r(m);
    std::vector<CVector> opw;
    opw.reserve(m);
    for (const auto& col : w) opw.push_back(matvec(op, col));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) r(i, j) = inner(w[i], opw[j]);
    return r;
}

Basis rotate_basis(const Basis& w, const ComplexMatrix& y) {
    const std::size_t m = w.size();
    const std::size_t n = w.front().size();
    Basis out(m, CVector(n));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t r = 0; r < n; ++r) out[j][r] += w[i][r] * y(i, j);
    return out;
}

// Splits a sorted value list into runs whose consecutive gaps are below tol.
std::vector<std::vector<std::size_t>> clusters(const std::vector<double>& sorted, double tol) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i == 0 || sorted[i] - sorted[i - 1] >= tol) out.emplace_back();
        out.back().push_back(i);
    }
    return out;
}

constexpr double kClusterTol = 1e-4;

// Diagonalizes the Hermitian operator `op` restricted to span(w) and returns
// the rotated basis together with the clusters of its eigenvalues.
std::pair<Basis, std::vector<std::vector<std::size_t>>> split(const Basis& w, const ComplexMatrix& op) {
    const HermitianEigen e = eig_hermitian(restrict_to(w, op));
    return {rotate_basis(w, e.vectors), clusters(e.values, kClusterTol)};
}

Basis pick(const Basis& w, const std::vector<std::size_t>& idx) {
    Basis out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(w[i]);
    return out;
}

}  // namespace

std::vector<EigenPair> eig_unitary(const ComplexMatrix& u) {
    const std::size_t n = u.dim();
    const double defect = unitarity_defect(u);
    if (!(defect <= 1e-10)) {
        throw NotUnitaryError("eig_unitary: ||u^dagger u - I||_F = " + num(defect));
    }
    const ComplexMatrix ua = u.adjoint();
    const ComplexMatrix cos_part = 0.5 * (u + ua);
    const ComplexMatrix sin_part = Complex(0.0, -0.5) * (u - ua);

    Basis full(n, CVector(n));
    for (std::size_t i = 0; i < n; ++i) full[i][i] = 1.0;

    // Stage 1 separates cos(theta); stage 2 resolves sin(theta) inside each
    // cos-cluster; stage 3 resolves whatever remains in a small arc around a
    // centre phase, where sin(theta - centre) is monotone.
    Basis result;
    result.reserve(n);
    auto [b1, c1] = split(full, cos_part);
    for (const auto& cl1 : c1) {
        const Basis w1 = pick(b1, cl1);
        if (w1.size() == 1) {
            result.push_back(w1[0]);
            continue;
        }
        auto [b2, c2] = split(w1, sin_part);
        for (const auto& cl2 : c2) {
            const Basis w2 = pick(b2, cl2);
            if (w2.size() == 1) {
                result.push_back(w2[0]);
                continue;
            }
            const Complex centre = restrict_to(w2, u).trace();
            const Complex rot = std::abs(centre) > 0.0 ? std::conj(centre) / std::abs(centre) : 1.0;
            const ComplexMatrix local = Complex(0.0, -0.5) * (rot * u - std::conj(rot) * ua);
            auto [b3, c3] = split(w2, local);
            (void)c3;
            for (auto& v : b3) result.push_back(std::move(v));
        }
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(n);
    for (auto& v : result) {
        normalize_in_place(v);
        const Complex rq = expectation(v, u);
        double phase = std::arg(rq);
        if (phase <= -kPi) phase = kPi;
        pairs.push_back(EigenPair{phase, std::polar(1.0, phase), std::move(v)});
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const EigenPair& a, const EigenPair& b) { return a.phase < b.phase; });
    return pairs;
}

double spectral_norm(const ComplexMatrix& a) {
    const HermitianEigen e = eig_hermitian(matmul(a.adjoint(), a));
    return std::sqrt(std::max(0.0, e.values.back()));
}

}  // namespace unitrace
