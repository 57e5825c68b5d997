#include "r1kit/polynomial.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace r1kit::poly {

namespace {

struct Table {
    std::vector<Exponents> list;
    std::map<Exponents, std::size_t> index;
};

void enumerate(int rank, int remaining, Exponents& prefix, std::vector<Exponents>& out)
{
    if (static_cast<int>(prefix.size()) == rank - 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int a = remaining; a >= 0; --a) {
        prefix.push_back(a);
        enumerate(rank, remaining - a, prefix, out);
        prefix.pop_back();
    }
}

const Table& table(int rank, int degree)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, Table> tables;
    std::lock_guard lock(mutex);
    auto [it, inserted] = tables.try_emplace({rank, degree});
    if (inserted) {
        Table& t = it->second;
        if (degree >= 0) {
            if (rank == 0) {
                if (degree == 0)
                    t.list.push_back({});
            } else {
                Exponents prefix;
                enumerate(rank, degree, prefix, t.list);
            }
        }
        for (std::size_t i = 0; i < t.list.size(); ++i)
            t.index.emplace(t.list[i], i);
    }
    return it->second;
}

}  // namespace

const std::vector<Exponents>& monomials(int rank, int degree)
{
    if (rank < 0)
        throw std::invalid_argument("monomials: negative rank");
    return table(rank, degree).list;
}

std::size_t monomial_index(const Exponents& e)
{
    const int degree = std::accumulate(e.begin(), e.end(), 0);
    const auto& t = table(static_cast<int>(e.size()), degree);
    auto it = t.index.find(e);
    if (it == t.index.end())
        throw std::invalid_argument("monomial_index: invalid exponent vector");
    return it->second;
}

std::size_t monomial_count(int rank, int degree) { return monomials(rank, degree).size(); }

std::string monomial_label(const Exponents& e, char variable)
{
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0)
            continue;
        s += variable;
        if (e.size() > 1)
            s += std::to_string(i + 1);
        if (e[i] > 1)
            s += "^" + std::to_string(e[i]);
    }
    return s.empty() ? "1" : s;
}

}  // namespace r1kit::poly
