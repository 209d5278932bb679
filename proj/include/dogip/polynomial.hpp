#pragma once

/// @file polynomial.hpp
/// Multivariate polynomials in x, y, z and a small parser for expressions
/// such as "1+x", "2*x^2 - (y+1)*z" or "1e-20*(1+x)".
///
/// Grammar: expr := term (('+'|'-') term)*, term := unary ('*' unary)*,
/// unary := ('+'|'-') unary | power, power := atom ('^' uint)?,
/// atom := number | x | y | z | '(' expr ')'.

#include "dogip/core.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>

namespace dogip
{

class Polynomial
{
public:
    using Exponent = std::array<int, 3>;

    Polynomial() = default;
    explicit Polynomial(Real constant)
    {
        if (constant != 0)
            terms_[{0, 0, 0}] = constant;
    }
    static Polynomial variable(int axis)
    {
        Polynomial p;
        Exponent   e{0, 0, 0};
        e[static_cast<std::size_t>(axis)] = 1;
        p.terms_[e] = 1;
        return p;
    }

    [[nodiscard]] const std::map<Exponent, Real>& terms() const noexcept { return terms_; }

    [[nodiscard]] int degree() const noexcept
    {
        int deg = 0;
        for (const auto& [e, c] : terms_)
            deg = std::max(deg, e[0] + e[1] + e[2]);
        return deg;
    }

    /// Highest variable index used plus one (0 for constants).
    [[nodiscard]] int variables_used() const noexcept
    {
        int n = 0;
        for (const auto& [e, c] : terms_)
            for (int a = 0; a < 3; ++a)
                if (e[static_cast<std::size_t>(a)] > 0)
                    n = std::max(n, a + 1);
        return n;
    }

    [[nodiscard]] bool is_constant() const noexcept { return variables_used() == 0; }

    template <typename Vec>
    [[nodiscard]] Real operator()(const Vec& x) const
    {
        Real sum = 0;
        for (const auto& [e, c] : terms_)
        {
            Real term = c;
            for (int a = 0; a < 3; ++a)
                for (int p = 0; p < e[static_cast<std::size_t>(a)]; ++p)
                    term *= x[a];
            sum += term;
        }
        return sum;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        Polynomial r = a;
        for (const auto& [e, c] : b.terms_)
            r.terms_[e] += c;
        r.prune();
        return r;
    }
    friend Polynomial operator-(const Polynomial& a) { return Polynomial(-1) * a; }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        Polynomial r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_)
                r.terms_[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
        r.prune();
        return r;
    }

    [[nodiscard]] std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        os.precision(17);
        bool first = true;
        for (const auto& [e, c] : terms_)
        {
            if (!first)
                os << " + ";
            first = false;
            os << c;
            for (int a = 0; a < 3; ++a)
                if (e[static_cast<std::size_t>(a)] > 0)
                    os << '*' << "xyz"[a] << '^' << e[static_cast<std::size_t>(a)];
        }
        return os.str();
    }

private:
    void prune()
    {
        std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
    }

    std::map<Exponent, Real> terms_;
};

namespace detail
{

class PolynomialParser
{
public:
    explicit PolynomialParser(std::string_view text) : text_(text) {}

    Polynomial parse()
    {
        Polynomial p = expr();
        skip();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorCode::parse_error, what + " at position " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
    }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr()
    {
        Polynomial p = term();
        for (;;)
        {
            if (accept('+'))
                p = p + term();
            else if (accept('-'))
                p = p - term();
            else
                return p;
        }
    }

    Polynomial term()
    {
        Polynomial p = unary();
        while (accept('*'))
            p = p * unary();
        return p;
    }

    Polynomial unary()
    {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return power();
    }

    Polynomial power()
    {
        const Polynomial base = atom();
        if (!accept('^'))
            return base;
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("exponent must be a non-negative integer");
        const int  e = std::stoi(std::string(text_.substr(start, pos_ - start)));
        Polynomial r(1);
        for (int i = 0; i < e; ++i)
            r = r * base;
        return r;
    }

    Polynomial atom()
    {
        skip();
        if (pos_ >= text_.size())
            fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(')
        {
            ++pos_;
            Polynomial p = expr();
            if (!accept(')'))
                fail("missing ')'");
            return p;
        }
        if (c == 'x' || c == 'y' || c == 'z')
        {
            ++pos_;
            return Polynomial::variable(c - 'x');
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        {
            const std::string rest(text_.substr(pos_));
            char*             end = nullptr;
            const Real        v = std::strtod(rest.c_str(), &end);
            if (end == rest.c_str())
                fail("malformed number");
            pos_ += static_cast<std::size_t>(end - rest.c_str());
            return Polynomial(v);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t      pos_ = 0;
};

} // namespace detail

inline Polynomial parse_polynomial(std::string_view text)
{
    return detail::PolynomialParser(text).parse();
}

} // namespace dogip
