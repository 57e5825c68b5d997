#include "r1kit/f2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace r1kit::f2 {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

std::uint64_t bit_mask(std::size_t i) { return std::uint64_t{1} << (i % kWordBits); }

}  // namespace

// ---------------------------------------------------------------- BitVector

BitVector::BitVector(std::size_t size) : size_(size), words_(words_for(size), 0) {}

BitVector BitVector::from_string(std::string_view bits)
{
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            v.set(i);
        else if (bits[i] != '0')
            throw std::invalid_argument("BitVector::from_string: expected 0/1");
    }
    return v;
}

BitVector BitVector::unit(std::size_t size, std::size_t index)
{
    BitVector v(size);
    v.set(index);
    return v;
}

bool BitVector::get(std::size_t i) const
{
    if (i >= size_)
        throw std::out_of_range("BitVector::get: index out of range");
    return (words_[i / kWordBits] & bit_mask(i)) != 0;
}

void BitVector::set(std::size_t i, bool value)
{
    if (i >= size_)
        throw std::out_of_range("BitVector::set: index out of range");
    if (value)
        words_[i / kWordBits] |= bit_mask(i);
    else
        words_[i / kWordBits] &= ~bit_mask(i);
}

void BitVector::flip(std::size_t i)
{
    if (i >= size_)
        throw std::out_of_range("BitVector::flip: index out of range");
    words_[i / kWordBits] ^= bit_mask(i);
}

bool BitVector::is_zero() const
{
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t BitVector::popcount() const
{
    std::size_t n = 0;
    for (auto w : words_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::optional<std::size_t> BitVector::first_set() const
{
    for (std::size_t k = 0; k < words_.size(); ++k)
        if (words_[k] != 0)
            return k * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[k]));
    return std::nullopt;
}

std::vector<std::size_t> BitVector::support() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words_.size(); ++k) {
        std::uint64_t w = words_[k];
        while (w != 0) {
            out.push_back(k * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

bool BitVector::dot(const BitVector& other) const
{
    if (other.size_ != size_)
        throw std::invalid_argument("BitVector::dot: size mismatch");
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < words_.size(); ++k)
        acc ^= words_[k] & other.words_[k];
    return (std::popcount(acc) & 1) != 0;
}

BitVector& BitVector::operator^=(const BitVector& other)
{
    if (other.size_ != size_)
        throw std::invalid_argument("BitVector::operator^=: size mismatch");
    for (std::size_t k = 0; k < words_.size(); ++k)
        words_[k] ^= other.words_[k];
    return *this;
}

std::string BitVector::to_string() const
{
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i))
            s[i] = '1';
    return s;
}

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0)
{
}

BitMatrix::BitMatrix(std::initializer_list<std::initializer_list<int>> rows)
{
    const std::size_t nr = rows.size();
    const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
    *this = BitMatrix(nr, nc);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != nc)
            throw std::invalid_argument("BitMatrix: ragged initializer");
        std::size_t c = 0;
        for (int x : row) {
            if (x & 1)
                set(r, c);
            ++c;
        }
        ++r;
    }
}

BitMatrix BitMatrix::identity(std::size_t n)
{
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rows, std::size_t cols)
{
    BitMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        m.set_row(r, rows[r]);
    return m;
}

BitMatrix BitMatrix::from_columns(const std::vector<BitVector>& columns, std::size_t rows)
{
    BitMatrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
        m.set_column(c, columns[c]);
    return m;
}

BitMatrix BitMatrix::vstack(const BitMatrix& top, const BitMatrix& bottom)
{
    if (top.cols_ != bottom.cols_)
        throw std::invalid_argument("BitMatrix::vstack: column mismatch");
    BitMatrix m(top.rows_ + bottom.rows_, top.cols_);
    std::copy(top.data_.begin(), top.data_.end(), m.data_.begin());
    std::copy(bottom.data_.begin(), bottom.data_.end(),
              m.data_.begin() + static_cast<std::ptrdiff_t>(top.data_.size()));
    return m;
}

BitMatrix BitMatrix::hstack(const BitMatrix& left, const BitMatrix& right)
{
    if (left.rows_ != right.rows_)
        throw std::invalid_argument("BitMatrix::hstack: row mismatch");
    BitMatrix m(left.rows_, left.cols_ + right.cols_);
    m.add_block(0, 0, left);
    m.add_block(0, left.cols_, right);
    return m;
}

void BitMatrix::check(std::size_t r, std::size_t c) const
{
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("BitMatrix: entry (" + std::to_string(r) + "," + std::to_string(c) +
                                ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
}

bool BitMatrix::get(std::size_t r, std::size_t c) const
{
    check(r, c);
    return (data_[r * stride_ + c / kWordBits] & bit_mask(c)) != 0;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool value)
{
    check(r, c);
    auto& w = data_[r * stride_ + c / kWordBits];
    if (value)
        w |= bit_mask(c);
    else
        w &= ~bit_mask(c);
}

void BitMatrix::flip(std::size_t r, std::size_t c)
{
    check(r, c);
    data_[r * stride_ + c / kWordBits] ^= bit_mask(c);
}

BitVector BitMatrix::row(std::size_t r) const
{
    if (r >= rows_)
        throw std::out_of_range("BitMatrix::row: index out of range");
    BitVector v(cols_);
    auto src = row_words(r);
    std::copy(src.begin(), src.end(), v.words().begin());
    return v;
}

void BitMatrix::set_row(std::size_t r, const BitVector& v)
{
    if (r >= rows_)
        throw std::out_of_range("BitMatrix::set_row: index out of range");
    if (v.size() != cols_)
        throw std::invalid_argument("BitMatrix::set_row: length mismatch");
    std::copy(v.words().begin(), v.words().end(), row_words(r).begin());
}

BitVector BitMatrix::column(std::size_t c) const
{
    if (c >= cols_)
        throw std::out_of_range("BitMatrix::column: index out of range");
    BitVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        if (data_[r * stride_ + c / kWordBits] & bit_mask(c))
            v.set(r);
    return v;
}

void BitMatrix::set_column(std::size_t c, const BitVector& v)
{
    if (c >= cols_)
        throw std::out_of_range("BitMatrix::set_column: index out of range");
    if (v.size() != rows_)
        throw std::invalid_argument("BitMatrix::set_column: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r)
        set(r, c, v.get(r));
}

std::span<const std::uint64_t> BitMatrix::row_words(std::size_t r) const
{
    return {data_.data() + r * stride_, stride_};
}

std::span<std::uint64_t> BitMatrix::row_words(std::size_t r)
{
    return {data_.data() + r * stride_, stride_};
}

void BitMatrix::xor_row(std::size_t src, std::size_t dst)
{
    std::uint64_t* d = data_.data() + dst * stride_;
    const std::uint64_t* s = data_.data() + src * stride_;
    for (std::size_t k = 0; k < stride_; ++k)
        d[k] ^= s[k];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
}

BitMatrix BitMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
{
    if (r0 + nr > rows_ || c0 + nc > cols_)
        throw std::out_of_range("BitMatrix::block: out of range");
    BitMatrix m(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c)
            if (get(r0 + r, c0 + c))
                m.set(r, c);
    return m;
}

void BitMatrix::add_block(std::size_t r0, std::size_t c0, const BitMatrix& m)
{
    if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_)
        throw std::out_of_range("BitMatrix::add_block: out of range");
    if (c0 % kWordBits == 0) {
        const std::size_t w0 = c0 / kWordBits;
        for (std::size_t r = 0; r < m.rows_; ++r) {
            auto src = m.row_words(r);
            auto dst = row_words(r0 + r);
            for (std::size_t k = 0; k < src.size(); ++k)
                dst[w0 + k] ^= src[k];
        }
        return;
    }
    for (std::size_t r = 0; r < m.rows_; ++r)
        for (std::size_t c = 0; c < m.cols_; ++c)
            if (m.get(r, c))
                flip(r0 + r, c0 + c);
}

bool BitMatrix::is_zero() const
{
    return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t BitMatrix::popcount() const
{
    std::size_t n = 0;
    for (auto w : data_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

BitMatrix BitMatrix::transposed() const
{
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto words = row_words(r);
        for (std::size_t k = 0; k < stride_; ++k) {
            std::uint64_t w = words[k];
            while (w != 0) {
                const std::size_t c = k * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
                t.data_[c * t.stride_ + r / kWordBits] |= bit_mask(r);
                w &= w - 1;
            }
        }
    }
    return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix& rhs) const
{
    if (cols_ != rhs.rows_)
        throw std::invalid_argument("BitMatrix::operator*: shape mismatch " + std::to_string(rows_) + "x" +
                                    std::to_string(cols_) + " * " + std::to_string(rhs.rows_) + "x" +
                                    std::to_string(rhs.cols_));
    BitMatrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint64_t* dst = out.data_.data() + r * out.stride_;
        auto words = row_words(r);
        for (std::size_t k = 0; k < stride_; ++k) {
            std::uint64_t w = words[k];
            while (w != 0) {
                const std::size_t j = k * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
                const std::uint64_t* src = rhs.data_.data() + j * rhs.stride_;
                for (std::size_t q = 0; q < out.stride_; ++q)
                    dst[q] ^= src[q];
                w &= w - 1;
            }
        }
    }
    return out;
}

BitVector BitMatrix::operator*(const BitVector& v) const
{
    if (v.size() != cols_)
        throw std::invalid_argument("BitMatrix::operator*(BitVector): length mismatch");
    BitVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto words = row_words(r);
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < stride_; ++k)
            acc ^= words[k] & v.words()[k];
        if (std::popcount(acc) & 1)
            out.set(r);
    }
    return out;
}

BitMatrix& BitMatrix::operator+=(const BitMatrix& rhs)
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("BitMatrix::operator+=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] ^= rhs.data_[k];
    return *this;
}

std::string BitMatrix::to_string() const
{
    std::string s;
    for (std::size_t r = 0; r < rows_; ++r) {
        s += row(r).to_string();
        s += '\n';
    }
    return s;
}

// ---------------------------------------------------------------- elimination

namespace {

// Gauss-Jordan on `m` in place, choosing pivots only among the first
// `pivot_cols` columns.  Returns the pivot columns in increasing order.
std::vector<std::size_t> eliminate(BitMatrix& m, std::size_t pivot_cols, bool full)
{
    std::vector<std::size_t> pivots;
    const std::size_t rows = m.rows();
    const std::size_t stride = m.stride();
    std::size_t r = 0;
    for (std::size_t c = 0; c < pivot_cols && r < rows; ++c) {
        const std::size_t wi = c / kWordBits;
        const std::uint64_t mask = bit_mask(c);
        std::size_t p = r;
        while (p < rows && (m.row_words(p)[wi] & mask) == 0)
            ++p;
        if (p == rows)
            continue;
        m.swap_rows(p, r);
        const std::uint64_t* prow = m.row_words(r).data();
        for (std::size_t i = full ? 0 : r + 1; i < rows; ++i) {
            if (i == r)
                continue;
            std::uint64_t* row = m.row_words(i).data();
            if (row[wi] & mask)
                for (std::size_t k = wi; k < stride; ++k)
                    row[k] ^= prow[k];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

Rref rref(const BitMatrix& m)
{
    Rref out{m, 0, {}};
    out.pivots = eliminate(out.reduced, m.cols(), true);
    out.rank = out.pivots.size();
    return out;
}

std::size_t rank(const BitMatrix& m)
{
    BitMatrix work = m;
    return eliminate(work, m.cols(), false).size();
}

// ---------------------------------------------------------------- Subspace

Subspace::Subspace(std::size_t ambient) : ambient_(ambient), basis_(0, ambient) {}

Subspace Subspace::full(std::size_t ambient)
{
    return row_span(BitMatrix::identity(ambient));
}

Subspace Subspace::row_span(const BitMatrix& rows)
{
    Rref r = rref(rows);
    Subspace s(rows.cols());
    s.basis_ = r.reduced.block(0, 0, r.rank, rows.cols());
    s.pivots_ = std::move(r.pivots);
    return s;
}

Subspace Subspace::column_span(const BitMatrix& m)
{
    return row_span(m.transposed());
}

Subspace Subspace::spanned_by(const std::vector<BitVector>& vectors, std::size_t ambient)
{
    return row_span(BitMatrix::from_rows(vectors, ambient));
}

std::vector<std::size_t> Subspace::complement_indices() const
{
    std::vector<std::size_t> out;
    std::size_t p = 0;
    for (std::size_t c = 0; c < ambient_; ++c) {
        if (p < pivots_.size() && pivots_[p] == c)
            ++p;
        else
            out.push_back(c);
    }
    return out;
}

BitVector Subspace::reduce(const BitVector& v) const
{
    if (v.size() != ambient_)
        throw std::invalid_argument("Subspace::reduce: ambient mismatch");
    BitVector w = v;
    for (std::size_t j = 0; j < pivots_.size(); ++j)
        if (w.get(pivots_[j])) {
            auto src = basis_.row_words(j);
            auto dst = w.words();
            for (std::size_t k = 0; k < src.size(); ++k)
                dst[k] ^= src[k];
        }
    return w;
}

bool Subspace::contains(const BitVector& v) const { return reduce(v).is_zero(); }

bool Subspace::contains(const Subspace& other) const
{
    if (other.ambient_ != ambient_)
        throw std::invalid_argument("Subspace::contains: ambient mismatch");
    for (std::size_t i = 0; i < other.dim(); ++i)
        if (!contains(other.basis_vector(i)))
            return false;
    return true;
}

BitVector Subspace::coordinates(const BitVector& v) const
{
    if (!contains(v))
        throw std::invalid_argument("Subspace::coordinates: vector not in subspace");
    BitVector c(dim());
    for (std::size_t j = 0; j < pivots_.size(); ++j)
        if (v.get(pivots_[j]))
            c.set(j);
    return c;
}

Subspace Subspace::sum(const Subspace& other) const
{
    if (other.ambient_ != ambient_)
        throw std::invalid_argument("Subspace::sum: ambient mismatch");
    return row_span(BitMatrix::vstack(basis_, other.basis_));
}

Subspace Subspace::intersection(const Subspace& other) const
{
    if (other.ambient_ != ambient_)
        throw std::invalid_argument("Subspace::intersection: ambient mismatch");
    // Solve sum x_i a_i = sum y_j b_j; the kernel of [A^T | B^T] parametrizes the intersection.
    const BitMatrix stacked = BitMatrix::hstack(basis_.transposed(), other.basis_.transposed());
    const Subspace k = kernel_basis(stacked);
    std::vector<BitVector> vectors;
    for (std::size_t i = 0; i < k.dim(); ++i) {
        const BitVector xy = k.basis_vector(i);
        BitVector v(ambient_);
        for (std::size_t j = 0; j < dim(); ++j)
            if (xy.get(j))
                v ^= basis_vector(j);
        vectors.push_back(std::move(v));
    }
    return spanned_by(vectors, ambient_);
}

Subspace kernel_basis(const BitMatrix& m)
{
    const Rref r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : r.pivots)
        is_pivot[p] = true;
    std::vector<BitVector> vectors;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        BitVector v(m.cols());
        v.set(f);
        for (std::size_t j = 0; j < r.rank; ++j)
            if (r.reduced.get(j, f))
                v.set(r.pivots[j]);
        vectors.push_back(std::move(v));
    }
    return Subspace::spanned_by(vectors, m.cols());
}

std::optional<BitVector> solve(const BitMatrix& m, const BitVector& target)
{
    if (target.size() != m.rows())
        throw std::invalid_argument("solve: target length must equal row count");
    BitMatrix aug = BitMatrix::hstack(m, BitMatrix::from_columns({target}, m.rows()));
    const auto pivots = eliminate(aug, m.cols() + 1, true);
    if (!pivots.empty() && pivots.back() == m.cols())
        return std::nullopt;
    BitVector x(m.cols());
    for (std::size_t j = 0; j < pivots.size(); ++j)
        if (aug.get(j, m.cols()))
            x.set(pivots[j]);
    return x;
}

// ---------------------------------------------------------------- Basis

Basis::Basis(std::size_t ambient, std::vector<BitVector> vectors)
    : ambient_(ambient), vectors_(std::move(vectors)), span_(ambient)
{
    const std::size_t k = vectors_.size();
    for (const auto& v : vectors_)
        if (v.size() != ambient_)
            throw std::invalid_argument("Basis: vector length mismatch");
    BitMatrix aug = BitMatrix::hstack(BitMatrix::from_rows(vectors_, ambient_), BitMatrix::identity(k));
    const auto pivots = eliminate(aug, ambient_, true);
    if (pivots.size() != k)
        throw std::invalid_argument("Basis: vectors are linearly dependent");
    span_ = Subspace::row_span(aug.block(0, 0, k, ambient_));
    transform_ = aug.block(0, ambient_, k, k);
}

BitMatrix Basis::as_columns() const { return BitMatrix::from_columns(vectors_, ambient_); }

std::optional<BitVector> Basis::coordinates(const BitVector& v) const
{
    if (v.size() != ambient_)
        throw std::invalid_argument("Basis::coordinates: ambient mismatch");
    if (!span_.contains(v))
        return std::nullopt;
    BitVector out(vectors_.size());
    const auto& pivots = span_.pivots();
    for (std::size_t j = 0; j < pivots.size(); ++j)
        if (v.get(pivots[j]))
            out ^= transform_.row(j);
    return out;
}

}  // namespace r1kit::f2
