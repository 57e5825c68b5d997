#include "r1kit/fixture_io.hpp"

#include <fstream>
#include <sstream>

namespace r1kit::io {

using f2::BitMatrix;
using unstable::TruncatedModule;

namespace {

void write_matrix(std::ostringstream& out, const BitMatrix& a)
{
    for (std::size_t r = 0; r < a.rows(); ++r)
        out << a.row(r).to_string() << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Next non-empty, non-comment line split into tokens; empty at end of input.
    std::vector<std::string> next()
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#')
                continue;
            last_ = line.substr(first);
            std::istringstream ss(last_);
            std::vector<std::string> tokens;
            for (std::string t; ss >> t;)
                tokens.push_back(t);
            return tokens;
        }
        return {};
    }

    const std::string& raw() const { return last_; }
    int line() const { return line_no_; }
    [[noreturn]] void fail(const std::string& what) const { throw FixtureError(line_no_, what); }

    long integer(const std::string& s) const
    {
        try {
            std::size_t pos = 0;
            const long v = std::stol(s, &pos);
            if (pos != s.size())
                fail("not an integer: " + s);
            return v;
        } catch (const std::logic_error&) {
            fail("not an integer: " + s);
        }
    }

    BitMatrix matrix(std::size_t rows, std::size_t cols)
    {
        BitMatrix a(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto t = next();
            if (t.size() != 1 || t[0].size() != cols || t[0].find_first_not_of("01") != std::string::npos)
                fail("expected a row of " + std::to_string(cols) + " bits");
            a.set_row(r, f2::BitVector::from_string(t[0]));
        }
        return a;
    }

private:
    std::istream& in_;
    int line_no_ = 0;
    std::string last_;
};

}  // namespace

std::string write_fixture(const TruncatedModule& m, const std::vector<BitMatrix>* u)
{
    std::ostringstream out;
    const int top = m.top();
    out << "name " << m.name() << '\n';
    out << "D " << top << '\n';
    out << "dims";
    for (int n = 0; n <= top; ++n)
        out << ' ' << m.dim(n);
    out << '\n';
    for (int n = 0; n <= top; ++n) {
        if (m.dim(n) == 0)
            continue;
        out << "labels " << n;
        for (const auto& l : m.labels(n))
            out << ' ' << l;
        out << '\n';
    }
    for (int n = 0; n <= top; ++n)
        for (int i = 1; n + i <= top; ++i) {
            const BitMatrix& a = m.sq(i, n);
            if (a.is_zero())
                continue;
            out << "action " << i << ' ' << n << '\n';
            write_matrix(out, a);
        }
    if (u)
        for (int n = 0; n < static_cast<int>(u->size()); ++n) {
            if ((*u)[n].is_zero())
                continue;
            out << "u " << n << '\n';
            write_matrix(out, (*u)[n]);
        }
    out << "end\n";
    return out.str();
}

std::string write_fixture(const fulu::FuluModule& n) { return write_fixture(*n.module, &n.u); }

Fixture read_fixture(std::istream& in)
{
    Reader rd(in);
    std::string name;
    std::optional<int> top;
    std::vector<std::size_t> dims;
    std::shared_ptr<TruncatedModule> m;
    std::vector<BitMatrix> u;
    bool has_u = false;

    auto require_module = [&]() {
        if (m)
            return;
        if (!top || dims.empty())
            rd.fail("D and dims must precede labels, action and u blocks");
        m = std::make_shared<TruncatedModule>(name, *top, dims);
        for (int n = 0; n < *top; ++n)
            u.emplace_back(dims[n + 1], dims[n]);
    };

    for (;;) {
        const auto t = rd.next();
        if (t.empty())
            rd.fail("unexpected end of input (missing 'end')");
        const std::string& key = t[0];
        if (key == "end")
            break;
        if (key == "name") {
            if (m)
                rd.fail("name after the module body");
            name = rd.raw().size() > 5 ? rd.raw().substr(5) : "";
        } else if (key == "D") {
            if (t.size() != 2 || top)
                rd.fail("expected a single 'D <top>'");
            const long d = rd.integer(t[1]);
            if (d < 0 || d > 4096)
                rd.fail("top degree out of range");
            top = static_cast<int>(d);
        } else if (key == "dims") {
            if (!top)
                rd.fail("dims before D");
            if (t.size() != static_cast<std::size_t>(*top) + 2)
                rd.fail("expected " + std::to_string(*top + 1) + " dimensions");
            for (std::size_t k = 1; k < t.size(); ++k) {
                const long d = rd.integer(t[k]);
                if (d < 0)
                    rd.fail("negative dimension");
                dims.push_back(static_cast<std::size_t>(d));
            }
        } else if (key == "labels") {
            require_module();
            if (t.size() < 2)
                rd.fail("labels needs a degree");
            const long n = rd.integer(t[1]);
            if (n < 0 || n > *top || t.size() - 2 != dims[n])
                rd.fail("labels do not match the dimension");
            m->set_labels(static_cast<int>(n), std::vector<std::string>(t.begin() + 2, t.end()));
        } else if (key == "action") {
            require_module();
            if (t.size() != 3)
                rd.fail("expected 'action <i> <n>'");
            const long i = rd.integer(t[1]);
            const long n = rd.integer(t[2]);
            if (i < 1 || n < 0 || n + i > *top)
                rd.fail("Sq^" + t[1] + " on degree " + t[2] + " is outside the truncation");
            m->set_sq(static_cast<int>(i), static_cast<int>(n), rd.matrix(dims[n + i], dims[n]));
        } else if (key == "u") {
            require_module();
            if (t.size() != 2)
                rd.fail("expected 'u <n>'");
            const long n = rd.integer(t[1]);
            if (n < 0 || n >= *top)
                rd.fail("u on degree " + t[1] + " is outside the truncation");
            u[n] = rd.matrix(dims[n + 1], dims[n]);
            has_u = true;
        } else {
            rd.fail("unknown keyword '" + key + "'");
        }
    }
    require_module();
    Fixture f{m, std::nullopt};
    if (has_u)
        f.u = std::move(u);
    return f;
}

Fixture read_fixture_string(const std::string& text)
{
    std::istringstream in(text);
    return read_fixture(in);
}

Fixture load_fixture(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open fixture file " + path);
    return read_fixture(in);
}

}  // namespace r1kit::io
