#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nctest/fragment.hpp"
#include "nctest/matrix.hpp"

namespace nctest {

using Cplx = std::complex<double>;

/// Square complex matrix (operators on a d-dimensional Hilbert space).
class CMatrix {
public:
    CMatrix() : dim_(0) {}
    explicit CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, Cplx(0, 0)) {}

    static CMatrix identity(std::size_t dim)
    {
        CMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = Cplx(1, 0);
        return m;
    }

    std::size_t dim() const { return dim_; }
    Cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const Cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b)
    {
        if (a.dim_ != b.dim_) throw std::invalid_argument("operator dimension mismatch");
        CMatrix c(a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i)
            for (std::size_t k = 0; k < a.dim_; ++k) {
                Cplx aik = a(i, k);
                if (aik == Cplx(0, 0)) continue;
                for (std::size_t j = 0; j < a.dim_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend CMatrix operator+(const CMatrix& a, const CMatrix& b)
    {
        if (a.dim_ != b.dim_) throw std::invalid_argument("operator dimension mismatch");
        CMatrix c(a.dim_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
        return c;
    }

    friend CMatrix operator-(const CMatrix& a, const CMatrix& b)
    {
        if (a.dim_ != b.dim_) throw std::invalid_argument("operator dimension mismatch");
        CMatrix c(a.dim_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
        return c;
    }

    friend CMatrix operator*(Cplx s, const CMatrix& a)
    {
        CMatrix c(a.dim_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = s * a.data_[i];
        return c;
    }

    Cplx trace() const
    {
        Cplx t(0, 0);
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

private:
    std::size_t dim_;
    std::vector<Cplx> data_;
};

inline double hermiticity_defect(const CMatrix& op)
{
    double worst = 0;
    for (std::size_t i = 0; i < op.dim(); ++i)
        for (std::size_t j = 0; j < op.dim(); ++j)
            worst = std::max(worst, std::abs(op(i, j) - std::conj(op(j, i))));
    return worst;
}

inline void require_hermitian(const CMatrix& op, double eps, const std::string& what)
{
    double defect = hermiticity_defect(op);
    if (defect > eps)
        throw std::invalid_argument(what + " is not Hermitian (defect " +
                                    std::to_string(defect) + ")");
}

/// Orthonormal basis of Hermitian d x d operators under the trace inner
/// product, identity first.
struct HermitianBasis {
    std::size_t dim = 0;
    std::vector<CMatrix> elements;  // dim^2 operators
};

/// Generalized Gell-Mann family scaled to orthonormality, ordered as
/// identity, symmetric off-diagonal, antisymmetric off-diagonal, diagonal.
/// For d = 2 this is {I, X, Y, Z}/sqrt(2).
inline HermitianBasis hermitian_basis(std::size_t d)
{
    if (d == 0) throw std::invalid_argument("Hilbert-space dimension must be positive");
    HermitianBasis basis;
    basis.dim = d;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    CMatrix id(d);
    double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) id(i, i) = Cplx(inv_sqrt_d, 0);
    basis.elements.push_back(id);

    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k) {
            CMatrix sym(d);
            sym(j, k) = Cplx(inv_sqrt2, 0);
            sym(k, j) = Cplx(inv_sqrt2, 0);
            basis.elements.push_back(sym);
        }
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k) {
            CMatrix asym(d);
            asym(j, k) = Cplx(0, -inv_sqrt2);
            asym(k, j) = Cplx(0, inv_sqrt2);
            basis.elements.push_back(asym);
        }
    for (std::size_t l = 1; l < d; ++l) {
        CMatrix diag(d);
        double scale = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (std::size_t j = 0; j < l; ++j) diag(j, j) = Cplx(scale, 0);
        diag(l, l) = Cplx(-scale * static_cast<double>(l), 0);
        basis.elements.push_back(diag);
    }
    return basis;
}

/// Trace inner product tr(a·b) of two Hermitian operators (real up to
/// floating error).
inline double trace_inner(const CMatrix& a, const CMatrix& b)
{
    Cplx t(0, 0);
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
    return t.real();
}

/// Coordinates of a Hermitian operator in the given basis.
inline std::vector<double> to_vector(const CMatrix& op, const HermitianBasis& basis,
                                     double eps = 1e-9)
{
    if (op.dim() != basis.dim) throw std::invalid_argument("operator/basis dimension mismatch");
    require_hermitian(op, eps, "operator");
    std::vector<double> coords;
    coords.reserve(basis.elements.size());
    for (const CMatrix& b : basis.elements) {
        Cplx t(0, 0);
        for (std::size_t i = 0; i < op.dim(); ++i)
            for (std::size_t j = 0; j < op.dim(); ++j) t += b(i, j) * op(j, i);
        if (std::fabs(t.imag()) > eps)
            throw std::invalid_argument("operator coordinate has a nonreal value");
        coords.push_back(t.real());
    }
    return coords;
}

inline CMatrix from_vector(const std::vector<double>& coords, const HermitianBasis& basis)
{
    if (coords.size() != basis.elements.size())
        throw std::invalid_argument("coordinate/basis size mismatch");
    CMatrix op(basis.dim);
    for (std::size_t a = 0; a < coords.size(); ++a)
        op = op + Cplx(coords[a], 0) * basis.elements[a];
    return op;
}

/// Born-rule value tr(state·effect).
inline double born(const CMatrix& state, const CMatrix& effect)
{
    if (state.dim() != effect.dim()) throw std::invalid_argument("operator dimension mismatch");
    return trace_inner(state, effect);
}

/// Eigenvalues of a Hermitian operator by cyclic Jacobi rotations.
/// Used only for input validation.
inline std::vector<double> hermitian_eigenvalues(CMatrix a, double tol = 1e-10)
{
    std::size_t d = a.dim();
    if (d == 0) return {};
    double scale = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0) return std::vector<double>(d, 0.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= tol * scale) break;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                if (std::abs(a(p, q)) <= tol * scale * 1e-3) continue;
                // Unitary 2x2 diagonalization: phase out a(p,q), then rotate.
                Cplx apq = a(p, q);
                double phase = std::arg(apq);
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double m = std::abs(apq);
                double theta = 0.5 * std::atan2(2 * m, app - aqq);
                Cplx c(std::cos(theta), 0);
                Cplx s = std::polar(std::sin(theta), -phase);
                // Columns: [p q] -> [c·p + s·q, -conj(s)·p + c·q]
                for (std::size_t i = 0; i < d; ++i) {
                    Cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = aip * c + aiq * s;
                    a(i, q) = -aip * std::conj(s) + aiq * c;
                }
                for (std::size_t j = 0; j < d; ++j) {
                    Cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = std::conj(c) * apj + std::conj(s) * aqj;
                    a(q, j) = -s * apj + c * aqj;
                }
            }
    }
    std::vector<double> eig(d);
    for (std::size_t i = 0; i < d; ++i) eig[i] = a(i, i).real();
    return eig;
}

/// Converts a quantum fragment (density operators, POVM elements) into GPT
/// vectors over the orthonormal operator basis, with the unit effect and
/// maximally mixed state taken from the identity operator.
inline GptFragment<double> quantum_to_gpt(const std::vector<CMatrix>& states,
                                          const std::vector<CMatrix>& effects,
                                          const HermitianBasis& basis, double eps = 1e-9,
                                          bool validate = true)
{
    if (states.empty() || effects.empty())
        throw std::invalid_argument("need at least one state and one effect");
    std::size_t d = basis.dim;
    for (const CMatrix& s : states)
        if (s.dim() != d) throw std::invalid_argument("state dimension mismatch");
    for (const CMatrix& e : effects)
        if (e.dim() != d) throw std::invalid_argument("effect dimension mismatch");

    if (validate) {
        for (std::size_t i = 0; i < states.size(); ++i) {
            require_hermitian(states[i], eps, "state " + std::to_string(i));
            std::vector<double> eig = hermitian_eigenvalues(states[i]);
            for (double v : eig)
                if (v < -eps)
                    throw std::invalid_argument("state " + std::to_string(i) +
                                                " is not positive semidefinite (eigenvalue " +
                                                std::to_string(v) + ")");
            double tr = states[i].trace().real();
            if (tr <= eps || tr > 1 + eps)
                throw std::invalid_argument("state " + std::to_string(i) +
                                            " has trace outside (0, 1]");
        }
        CMatrix id = CMatrix::identity(d);
        for (std::size_t j = 0; j < effects.size(); ++j) {
            require_hermitian(effects[j], eps, "effect " + std::to_string(j));
            std::vector<double> eig = hermitian_eigenvalues(effects[j]);
            for (double v : eig)
                if (v < -eps)
                    throw std::invalid_argument("effect " + std::to_string(j) +
                                                " is not positive semidefinite (eigenvalue " +
                                                std::to_string(v) + ")");
            std::vector<double> comp = hermitian_eigenvalues(id - effects[j]);
            for (double v : comp)
                if (v < -eps)
                    throw std::invalid_argument("effect " + std::to_string(j) +
                                                " exceeds the identity (eigenvalue " +
                                                std::to_string(-v) + " above it)");
        }
    }

    GptFragment<double> frag;
    frag.ambient_dim = d * d;
    std::vector<std::vector<double>> srows, erows;
    for (const CMatrix& s : states) srows.push_back(to_vector(s, basis, eps));
    for (const CMatrix& e : effects) erows.push_back(to_vector(e, basis, eps));
    frag.states = Matrix<double>::from_rows(std::move(srows));
    frag.effects = Matrix<double>::from_rows(std::move(erows));
    CMatrix id = CMatrix::identity(d);
    frag.unit_effect = to_vector(id, basis, eps);
    frag.max_mixed = to_vector(Cplx(1.0 / static_cast<double>(d), 0) * id, basis, eps);
    return frag;
}

}  // namespace nctest
