// SPDX-License-Identifier: MIT
#include <tuple>
#include "pirlab/fplinalg.hpp"

#include <algorithm>
#include <sstream>

namespace pirlab {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonSquare: return "NonSquare";
        case Errc::Singular: return "Singular";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::BadParams: return "BadParams";
        case Errc::LengthNotDivisible: return "LengthNotDivisible";
        case Errc::UnknownScheme: return "UnknownScheme";
        case Errc::DecodeFailure: return "DecodeFailure";
        case Errc::SearchExhausted: return "SearchExhausted";
        case Errc::NotUnique: return "NotUnique";
        case Errc::NotEnumerable: return "NotEnumerable";
        case Errc::UnderPowered: return "UnderPowered";
        case Errc::AsymmetryDetected: return "AsymmetryDetected";
        case Errc::IoError: return "IoError";
        case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    }
    return "Unknown";
}

namespace {

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These bases are deterministic for all n < 2^64.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldPrime::FieldPrime(std::uint64_t p) {
    if (p < 2 || p >= (1ULL << 31) || !is_prime(p)) {
        throw Error(Errc::BadParams, "modulus " + std::to_string(p) + " is not a prime below 2^31");
    }
    p_ = static_cast<Residue>(p);
}

Residue FieldPrime::pow(Residue a, std::uint64_t e) const {
    return static_cast<Residue>(powmod64(a, e, p_));
}

Residue FieldPrime::inv(Residue a) const {
    if (a % p_ == 0) throw Error(Errc::Singular, "inverse of zero");
    std::int64_t r0 = p_, r1 = a % p_, t0 = 0, t1 = 1;
    while (r1) {
        const std::int64_t q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
    }
    return static_cast<Residue>(t0 < 0 ? t0 + p_ : t0);
}

Matrix::Matrix(FieldPrime f, std::initializer_list<std::initializer_list<std::int64_t>> rows) : f_(f) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(Errc::ShapeMismatch, "ragged matrix literal");
        for (auto v : r) a_.push_back(f_.reduce(v));
    }
}

Matrix::Matrix(FieldPrime f, const std::vector<std::vector<std::int64_t>>& rows) : f_(f) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.front().size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(Errc::ShapeMismatch, "ragged matrix literal");
        for (auto v : r) a_.push_back(f_.reduce(v));
    }
}

std::vector<Residue> Matrix::row(std::size_t r) const {
    return {a_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

Matrix Matrix::identity(std::size_t n, FieldPrime f) {
    Matrix m(n, n, f);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Matrix Matrix::from_rows(FieldPrime f, const std::vector<std::vector<Residue>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols, f);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw Error(Errc::ShapeMismatch, "row length");
        std::copy(rows[i].begin(), rows[i].end(), m.row_ptr(i));
    }
    return m;
}

std::string Matrix::to_string() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_; ++r) {
        os << '[';
        for (std::size_t c = 0; c < cols_; ++c) os << (c ? " " : "") << (*this)(r, c);
        os << "]\n";
    }
    return os.str();
}

static void check_field(const Matrix& a, const Matrix& b) {
    if (a.field() != b.field()) throw Error(Errc::ShapeMismatch, "field mismatch");
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    check_field(a, b);
    if (a.cols() != b.rows()) throw Error(Errc::ShapeMismatch, "product shape");
    const auto& f = a.field();
    const std::uint64_t p = f.p();
    Matrix out(a.rows(), b.cols(), f);
    std::vector<std::uint64_t> acc(b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            std::uint64_t x = a(i, k);
            if (!x) continue;
            const Residue* br = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) acc[j] = (acc[j] + x * br[j]) % p;
        }
        for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) = static_cast<Residue>(acc[j]);
    }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    check_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "sum shape");
    Matrix out(a.rows(), a.cols(), a.field());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = a.field().add(a(r, c), b(r, c));
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    check_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "difference shape");
    Matrix out(a.rows(), a.cols(), a.field());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = a.field().sub(a(r, c), b(r, c));
    return out;
}

Matrix scale(const Matrix& a, Residue s) {
    Matrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = a.field().mul(a(r, c), s);
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows(), m.field());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) t.at(c, r) = m(r, c);
    return t;
}

Matrix vstack(const Matrix& a, const Matrix& b) { return vstack(std::vector<Matrix>{a, b}); }

Matrix vstack(const std::vector<Matrix>& parts) {
    if (parts.empty()) throw Error(Errc::ShapeMismatch, "vstack of nothing");
    std::size_t rows = 0;
    const std::size_t cols = parts.front().cols();
    for (const auto& m : parts) {
        if (m.cols() != cols) throw Error(Errc::ShapeMismatch, "vstack column count");
        check_field(m, parts.front());
        rows += m.rows();
    }
    Matrix out(rows, cols, parts.front().field());
    std::size_t r0 = 0;
    for (const auto& m : parts) {
        std::copy(m.data().begin(), m.data().end(), out.row_ptr(0) + r0 * cols);
        r0 += m.rows();
    }
    return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    check_field(a, b);
    if (a.rows() != b.rows()) throw Error(Errc::ShapeMismatch, "hstack row count");
    Matrix out(a.rows(), a.cols() + b.cols(), a.field());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        std::copy(a.row_ptr(r), a.row_ptr(r) + a.cols(), out.row_ptr(r));
        std::copy(b.row_ptr(r), b.row_ptr(r) + b.cols(), out.row_ptr(r) + a.cols());
    }
    return out;
}

Matrix block_diag(const std::vector<Matrix>& blocks) {
    if (blocks.empty()) throw Error(Errc::ShapeMismatch, "block_diag of nothing");
    std::size_t rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Matrix out(rows, cols, blocks.front().field());
    std::size_t r0 = 0, c0 = 0;
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < b.rows(); ++r)
            std::copy(b.row_ptr(r), b.row_ptr(r) + b.cols(), out.row_ptr(r0 + r) + c0);
        r0 += b.rows();
        c0 += b.cols();
    }
    return out;
}

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), m.cols(), m.field());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= m.rows()) throw Error(Errc::ShapeMismatch, "row index");
        std::copy(m.row_ptr(idx[i]), m.row_ptr(idx[i]) + m.cols(), out.row_ptr(i));
    }
    return out;
}

Matrix first_rows(const Matrix& m, std::size_t k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    return select_rows(m, idx);
}

Matrix column_vector(FieldPrime f, const std::vector<Residue>& v) {
    Matrix m(v.size(), 1, f);
    for (std::size_t i = 0; i < v.size(); ++i) m.at(i, 0) = v[i] % f.p();
    return m;
}

std::vector<Residue> mat_vec(const Matrix& m, const std::vector<Residue>& v) {
    if (m.cols() != v.size()) throw Error(Errc::ShapeMismatch, "matrix-vector shape");
    const std::uint64_t p = m.p();
    std::vector<Residue> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::uint64_t acc = 0;
        const Residue* row = m.row_ptr(r);
        for (std::size_t c = 0; c < m.cols(); ++c) acc = (acc + static_cast<std::uint64_t>(row[c]) * v[c]) % p;
        out[r] = static_cast<Residue>(acc);
    }
    return out;
}

namespace {

// In-place Gauss-Jordan on the first `ncols` columns; returns pivot columns.
std::vector<std::size_t> gauss_jordan(Matrix& m, std::size_t ncols) {
    const auto& f = m.field();
    const std::uint64_t p = f.p();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < m.rows(); ++c) {
        std::size_t piv = r;
        while (piv < m.rows() && m(piv, c) == 0) ++piv;
        if (piv == m.rows()) continue;
        if (piv != r) {
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(r, j), m.at(piv, j));
        }
        const Residue iv = f.inv(m(r, c));
        Residue* rr = m.row_ptr(r);
        for (std::size_t j = 0; j < m.cols(); ++j) rr[j] = f.mul(rr[j], iv);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r) continue;
            const std::uint64_t factor = m(i, c);
            if (!factor) continue;
            Residue* ri = m.row_ptr(i);
            const std::uint64_t nf = p - factor;
            for (std::size_t j = 0; j < m.cols(); ++j) ri[j] = static_cast<Residue>((ri[j] + nf * rr[j]) % p);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

std::size_t mat_rank(const Matrix& m) {
    Matrix w = m;
    return gauss_jordan(w, w.cols()).size();
}

Residue mat_det(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(Errc::NonSquare, "determinant of non-square matrix");
    const auto& f = m.field();
    const std::uint64_t p = f.p();
    Matrix w = m;
    const std::size_t n = m.rows();
    Residue det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && w(piv, c) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w.at(c, j), w.at(piv, j));
            det = f.neg(det);
        }
        det = f.mul(det, w(c, c));
        const Residue iv = f.inv(w(c, c));
        for (std::size_t i = c + 1; i < n; ++i) {
            const Residue factor = f.mul(w(i, c), iv);
            if (!factor) continue;
            const std::uint64_t nf = p - factor;
            for (std::size_t j = c; j < n; ++j)
                w.at(i, j) = static_cast<Residue>((w(i, j) + nf * w(c, j)) % p);
        }
    }
    return det;
}

RrefResult mat_rref(const Matrix& m) {
    Matrix aug = hstack(m, Matrix::identity(m.rows(), m.field()));
    auto pivots = gauss_jordan(aug, m.cols());
    RrefResult out;
    out.rref = Matrix(m.rows(), m.cols(), m.field());
    out.basis_change = Matrix(m.rows(), m.rows(), m.field());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::copy(aug.row_ptr(r), aug.row_ptr(r) + m.cols(), out.rref.row_ptr(r));
        std::copy(aug.row_ptr(r) + m.cols(), aug.row_ptr(r) + aug.cols(), out.basis_change.row_ptr(r));
    }
    out.pivots = std::move(pivots);
    return out;
}

Matrix row_basis(const Matrix& m) {
    Matrix w = m;
    auto piv = gauss_jordan(w, w.cols());
    return first_rows(w, piv.size());
}

Matrix mat_invert(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(Errc::NonSquare, "inverse of non-square matrix");
    Matrix aug = hstack(m, Matrix::identity(m.rows(), m.field()));
    auto piv = gauss_jordan(aug, m.cols());
    if (piv.size() != m.rows()) throw Error(Errc::Singular, "matrix is singular");
    Matrix out(m.rows(), m.rows(), m.field());
    for (std::size_t r = 0; r < m.rows(); ++r)
        std::copy(aug.row_ptr(r) + m.cols(), aug.row_ptr(r) + aug.cols(), out.row_ptr(r));
    return out;
}

Matrix null_space(const Matrix& m) {
    Matrix w = m;
    auto piv = gauss_jordan(w, w.cols());
    std::vector<bool> is_piv(m.cols(), false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::vector<Residue>> basis;
    for (std::size_t fc = 0; fc < m.cols(); ++fc) {
        if (is_piv[fc]) continue;
        std::vector<Residue> v(m.cols(), 0);
        v[fc] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = m.field().neg(w(i, fc));
        basis.push_back(std::move(v));
    }
    return Matrix::from_rows(m.field(), basis, m.cols());
}

Matrix left_null_space(const Matrix& m) { return null_space(transpose(m)); }

Matrix row_space_intersect(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "intersection column count");
    Matrix ln = left_null_space(vstack(a, b));
    if (ln.rows() == 0) return Matrix(0, a.cols(), a.field());
    Matrix na(ln.rows(), a.rows(), a.field());
    for (std::size_t r = 0; r < ln.rows(); ++r)
        for (std::size_t c = 0; c < a.rows(); ++c) na.at(r, c) = ln(r, c);
    return row_basis(na * a);
}

Matrix solve_left(const Matrix& a, const Matrix& b) {
    // X a = b  <=>  a^T X^T = b^T
    if (a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "solve_left column count");
    const std::size_t n = a.rows();
    Matrix aug = hstack(transpose(a), transpose(b));
    auto piv = gauss_jordan(aug, n);
    // consistency: rows beyond rank must vanish in the b part
    for (std::size_t r = piv.size(); r < aug.rows(); ++r)
        for (std::size_t c = n; c < aug.cols(); ++c)
            if (aug(r, c) != 0) throw Error(Errc::Singular, "right-hand side outside the row space");
    Matrix xt(n, b.rows(), a.field());
    for (std::size_t i = 0; i < piv.size(); ++i)
        for (std::size_t c = 0; c < b.rows(); ++c) xt.at(piv[i], c) = aug(i, n + c);
    return transpose(xt);
}

Matrix sample_uniform(std::size_t rows, std::size_t cols, const FieldPrime& f, Rng& rng) {
    Matrix m(rows, cols, f);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = f.uniform(rng);
    return m;
}

Matrix sample_full_rank(std::size_t n, const FieldPrime& f, Rng& rng) {
    for (;;) {
        Matrix m = sample_uniform(n, n, f, rng);
        if (mat_rank(m) == n) return m;
    }
}

void EchelonBasis::reduce(std::vector<Residue>& v) const {
    const std::uint64_t p = f_.p();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const std::uint64_t x = v[pivots_[i]];
        if (!x) continue;
        const std::uint64_t nx = p - x;
        const auto& row = rows_[i];
        for (std::size_t c = pivots_[i]; c < cols_; ++c) v[c] = static_cast<Residue>((v[c] + nx * row[c]) % p);
    }
}

bool EchelonBasis::insert(std::vector<Residue> v) {
    reduce(v);
    std::size_t lead = 0;
    while (lead < cols_ && v[lead] == 0) ++lead;
    if (lead == cols_) return false;
    const Residue iv = f_.inv(v[lead]);
    for (std::size_t c = lead; c < cols_; ++c) v[c] = f_.mul(v[c], iv);
    // rows stay sorted by pivot so reduce() is one forward sweep
    auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), lead) - pivots_.begin();
    pivots_.insert(pivots_.begin() + pos, lead);
    rows_.insert(rows_.begin() + pos, std::move(v));
    return true;
}

}  // namespace pirlab
