#pragma once

// Exact linear algebra over GF(2) on bit-packed rows.
//
// Convention used throughout r1kit: a linear map V -> W between spaces of
// dimensions n and m is a BitMatrix with m rows and n columns acting on
// column vectors.  Subspaces are stored as canonical reduced row-echelon
// bases, so two subspaces are equal exactly when their bases are equal.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace r1kit::f2 {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size);
    static BitVector from_string(std::string_view bits);
    static BitVector unit(std::size_t size, std::size_t index);

    std::size_t size() const { return size_; }
    bool get(std::size_t i) const;
    void set(std::size_t i, bool value = true);
    void flip(std::size_t i);

    bool is_zero() const;
    std::size_t popcount() const;
    std::optional<std::size_t> first_set() const;
    std::vector<std::size_t> support() const;
    bool dot(const BitVector& other) const;

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b)
    {
        a ^= b;
        return a;
    }
    bool operator==(const BitVector&) const = default;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    std::string to_string() const;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);
    BitMatrix(std::initializer_list<std::initializer_list<int>> rows);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(const std::vector<BitVector>& rows, std::size_t cols);
    static BitMatrix from_columns(const std::vector<BitVector>& columns, std::size_t rows);
    static BitMatrix vstack(const BitMatrix& top, const BitMatrix& bottom);
    static BitMatrix hstack(const BitMatrix& left, const BitMatrix& right);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    bool get(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, bool value = true);
    void flip(std::size_t r, std::size_t c);

    BitVector row(std::size_t r) const;
    void set_row(std::size_t r, const BitVector& v);
    BitVector column(std::size_t c) const;
    void set_column(std::size_t c, const BitVector& v);

    std::span<const std::uint64_t> row_words(std::size_t r) const;
    std::span<std::uint64_t> row_words(std::size_t r);
    void xor_row(std::size_t src, std::size_t dst);
    void swap_rows(std::size_t a, std::size_t b);

    BitMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    // XORs `m` into the block starting at (r0, c0).
    void add_block(std::size_t r0, std::size_t c0, const BitMatrix& m);

    bool is_zero() const;
    std::size_t popcount() const;
    BitMatrix transposed() const;

    BitMatrix operator*(const BitMatrix& rhs) const;
    BitVector operator*(const BitVector& v) const;
    BitMatrix& operator+=(const BitMatrix& rhs);
    friend BitMatrix operator+(BitMatrix a, const BitMatrix& b)
    {
        a += b;
        return a;
    }
    bool operator==(const BitMatrix&) const = default;

    std::string to_string() const;

private:
    void check(std::size_t r, std::size_t c) const;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> data_;
};

struct Rref {
    BitMatrix reduced;  // same shape as the input, zero rows last
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
};

Rref rref(const BitMatrix& m);
std::size_t rank(const BitMatrix& m);

class Subspace {
public:
    explicit Subspace(std::size_t ambient = 0);
    static Subspace full(std::size_t ambient);
    static Subspace row_span(const BitMatrix& rows);
    static Subspace column_span(const BitMatrix& m);
    static Subspace spanned_by(const std::vector<BitVector>& vectors, std::size_t ambient);

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.rows(); }
    bool is_zero() const { return dim() == 0; }
    const BitMatrix& basis() const { return basis_; }
    BitVector basis_vector(std::size_t i) const { return basis_.row(i); }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    std::vector<std::size_t> complement_indices() const;

    // v minus its component along the basis: zero at every pivot column.
    BitVector reduce(const BitVector& v) const;
    bool contains(const BitVector& v) const;
    bool contains(const Subspace& other) const;
    // Coordinates with respect to basis(); throws std::invalid_argument if v is not a member.
    BitVector coordinates(const BitVector& v) const;

    Subspace sum(const Subspace& other) const;
    Subspace intersection(const Subspace& other) const;

    bool operator==(const Subspace&) const = default;

private:
    std::size_t ambient_ = 0;
    BitMatrix basis_;
    std::vector<std::size_t> pivots_;
};

Subspace kernel_basis(const BitMatrix& m);
inline Subspace image(const BitMatrix& m) { return Subspace::column_span(m); }

// Solves m x = target.  Free variables are set to zero, so the answer is
// deterministic.  std::nullopt means the system is inconsistent.
std::optional<BitVector> solve(const BitMatrix& m, const BitVector& target);

// An ordered linearly independent family with coordinates relative to that
// order (not to the canonical rref basis).
class Basis {
public:
    Basis() = default;
    Basis(std::size_t ambient, std::vector<BitVector> vectors);

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t size() const { return vectors_.size(); }
    const std::vector<BitVector>& vectors() const { return vectors_; }
    const BitVector& operator[](std::size_t i) const { return vectors_[i]; }
    const Subspace& span() const { return span_; }
    BitMatrix as_columns() const;

    std::optional<BitVector> coordinates(const BitVector& v) const;

private:
    std::size_t ambient_ = 0;
    std::vector<BitVector> vectors_;
    Subspace span_;
    BitMatrix transform_;  // row j expresses span_.basis() row j in terms of vectors_
};

}  // namespace r1kit::f2
