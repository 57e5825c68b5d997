#include "r1kit/steenrod.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

namespace r1kit::steenrod {

bool is_admissible(const SqWord& w)
{
    for (std::size_t j = 0; j + 1 < w.size(); ++j)
        if (w[j] < 2 * w[j + 1])
            return false;
    return true;
}

int degree(const SqWord& w) { return std::accumulate(w.begin(), w.end(), 0); }

std::string to_string(const SqWord& w)
{
    if (w.empty())
        return "1";
    std::string s;
    for (int i : w)
        s += "Sq" + std::to_string(i);
    return s;
}

bool binomial_mod2(long n, long k)
{
    if (n < 0 || k < 0 || k > n)
        return false;
    return (n & k) == k;
}

AdmissibleMonomial::AdmissibleMonomial(SqWord factors) : factors_(std::move(factors))
{
    for (int i : factors_)
        if (i < 1)
            throw std::invalid_argument("AdmissibleMonomial: entries must be >= 1");
    if (!is_admissible(factors_))
        throw std::invalid_argument("AdmissibleMonomial: " + steenrod::to_string(factors_) + " is not admissible");
}

int AdmissibleMonomial::excess() const
{
    if (factors_.empty())
        return 0;
    return factors_.front() - (degree() - factors_.front());
}

namespace {

class NormalFormCache {
public:
    static NormalFormCache& instance()
    {
        static NormalFormCache cache;
        return cache;
    }

    std::vector<SqWord> normal_form(const SqWord& w)
    {
        if (is_admissible(w))
            return {w};
        {
            std::lock_guard lock(mutex_);
            if (auto it = memo_.find(w); it != memo_.end())
                return it->second;
        }
        // Leftmost inadmissible pair Sq^a Sq^b (a < 2b) rewritten by the Adem relation
        //   Sq^a Sq^b = sum_{c=0}^{a/2} binom(b-c-1, a-2c) Sq^{a+b-c} Sq^c.
        // The rewritten words are lexicographically larger, so this terminates.
        std::size_t j = 0;
        while (w[j] >= 2 * w[j + 1])
            ++j;
        const int a = w[j];
        const int b = w[j + 1];
        std::set<SqWord> acc;
        for (int c = 0; 2 * c <= a; ++c) {
            if (!binomial_mod2(b - c - 1, a - 2 * c))
                continue;
            SqWord next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j));
            next.push_back(a + b - c);
            if (c > 0)
                next.push_back(c);
            next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(j + 2), w.end());
            for (auto& m : normal_form(next))
                if (!acc.erase(m))
                    acc.insert(std::move(m));
        }
        std::vector<SqWord> out(acc.begin(), acc.end());
        std::lock_guard lock(mutex_);
        memo_.emplace(w, out);
        return out;
    }

private:
    std::mutex mutex_;
    std::map<SqWord, std::vector<SqWord>> memo_;
};

void admissible_sequences(int remaining, int max_first, SqWord& prefix, std::vector<SqWord>& out)
{
    if (remaining == 0) {
        out.push_back(prefix);
        return;
    }
    for (int i = 1; i <= std::min(remaining, max_first); ++i) {
        prefix.push_back(i);
        admissible_sequences(remaining - i, i / 2, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<AdmissibleMonomial> adem_normal_form(const SqWord& w)
{
    for (int i : w)
        if (i < 1)
            throw std::invalid_argument("adem_normal_form: entries must be >= 1");
    std::vector<AdmissibleMonomial> out;
    for (auto& m : NormalFormCache::instance().normal_form(w))
        out.emplace_back(std::move(m));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<AdmissibleMonomial> multiply(const SqWord& a, const SqWord& b)
{
    SqWord w = a;
    w.insert(w.end(), b.begin(), b.end());
    return adem_normal_form(w);
}

std::vector<AdmissibleMonomial> admissible_basis(int n)
{
    if (n < 0)
        return {};
    std::vector<SqWord> seqs;
    SqWord prefix;
    admissible_sequences(n, n, prefix, seqs);
    std::sort(seqs.begin(), seqs.end());
    std::vector<AdmissibleMonomial> out;
    out.reserve(seqs.size());
    for (auto& s : seqs)
        out.emplace_back(std::move(s));
    return out;
}

std::vector<AdmissibleMonomial> admissible_basis(int n, int max_excess)
{
    auto all = admissible_basis(n);
    std::erase_if(all, [&](const AdmissibleMonomial& m) { return m.excess() > max_excess; });
    return all;
}

}  // namespace r1kit::steenrod
