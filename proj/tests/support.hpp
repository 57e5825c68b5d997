#pragma once

#include "r1kit/f2.hpp"

#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

namespace testing {

inline std::uint64_t seed()
{
    if (const char* s = std::getenv("R1KIT_TEST_SEED"))
        return std::strtoull(s, nullptr, 10);
    return 20240611;
}

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(seed());
    return gen;
}

inline std::size_t uniform(std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng());
}

inline r1kit::f2::BitMatrix random_matrix(std::size_t rows, std::size_t cols, double density = 0.5)
{
    std::bernoulli_distribution bit(density);
    r1kit::f2::BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (bit(rng()))
                m.set(r, c);
    return m;
}

inline r1kit::f2::BitVector random_vector(std::size_t n)
{
    std::bernoulli_distribution bit(0.5);
    r1kit::f2::BitVector v(n);
    for (std::size_t i = 0; i < n; ++i)
        if (bit(rng()))
            v.set(i);
    return v;
}

// Plain boolean Gaussian elimination, kept deliberately naive.
using Dense = std::vector<std::vector<bool>>;

inline Dense to_dense(const r1kit::f2::BitMatrix& m)
{
    Dense d(m.rows(), std::vector<bool>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            d[r][c] = m.get(r, c);
    return d;
}

inline std::size_t naive_rank(Dense d)
{
    std::size_t rank = 0;
    const std::size_t cols = d.empty() ? 0 : d[0].size();
    for (std::size_t c = 0; c < cols && rank < d.size(); ++c) {
        std::size_t p = rank;
        while (p < d.size() && !d[p][c])
            ++p;
        if (p == d.size())
            continue;
        std::swap(d[p], d[rank]);
        for (std::size_t r = 0; r < d.size(); ++r)
            if (r != rank && d[r][c])
                for (std::size_t k = 0; k < cols; ++k)
                    d[r][k] = d[r][k] != d[rank][k];
        ++rank;
    }
    return rank;
}

}  // namespace testing
