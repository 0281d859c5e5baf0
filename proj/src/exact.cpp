#include "dimincr/exact.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <map>
#include <stdexcept>

namespace dimincr {

namespace {
using BigFloat = boost::multiprecision::cpp_bin_float_100;

BigInt gcd(BigInt a, BigInt b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        BigInt t = a % b;
        a = std::move(b);
        b = std::move(t);
    }
    return a;
}
} // namespace

Rat::Rat(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0)
        throw std::invalid_argument("Rat: zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    BigInt g = gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rat Rat::from_double(double x) {
    if (!std::isfinite(x))
        throw std::invalid_argument("Rat::from_double: non-finite value");
    if (x == 0.0) return Rat();
    int exp = 0;
    double mant = std::frexp(x, &exp); // x = mant * 2^exp, |mant| in [0.5,1)
    // scale mantissa to an exact 53-bit integer
    auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    BigInt n = scaled, d = 1;
    if (exp >= 0)
        n <<= exp;
    else
        d <<= -exp;
    return Rat(std::move(n), std::move(d));
}

Rat Rat::from_string(const std::string& s) {
    if (s.empty())
        throw std::invalid_argument("Rat::from_string: empty");
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));

    // decimal / scientific form with exact base-10 scaling
    std::string t = s;
    long long exp10 = 0;
    auto e = t.find_first_of("eE");
    if (e != std::string::npos) {
        exp10 = std::stoll(t.substr(e + 1));
        t = t.substr(0, e);
    }
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long long>(t.size() - dot - 1);
        t.erase(dot, 1);
    }
    if (t.empty() || t == "-" || t == "+")
        throw std::invalid_argument("Rat::from_string: bad literal '" + s + "'");
    BigInt n(t), d = 1;
    BigInt ten = 10;
    for (long long i = 0; i < std::llabs(exp10); ++i) {
        if (exp10 > 0)
            n *= ten;
        else
            d *= ten;
    }
    return Rat(std::move(n), std::move(d));
}

double Rat::to_double() const {
    return static_cast<double>(BigFloat(num_) / BigFloat(den_));
}

std::string Rat::to_string() const {
    if (den_ == 1) return num_.str();
    return num_.str() + "/" + den_.str();
}

Rat Rat::pow(unsigned e) const {
    Rat r(1);
    Rat base = *this;
    while (e) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

std::pair<BigInt, BigInt> squarefree_split(const BigInt& radicand) {
    if (radicand < 0)
        throw std::invalid_argument("squarefree_split: negative radicand");
    BigInt s = 1, f = 1, m = radicand;
    if (m == 0) return {0, 0};
    for (BigInt p = 2; p * p <= m; ++p) {
        if (m % p != 0) continue;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        for (unsigned i = 0; i + 1 < e; i += 2)
            s *= p;
        if (e & 1u) f *= p;
    }
    f *= m; // remaining prime
    return {s, f};
}

int sqrt_combination_sign(std::vector<std::pair<BigInt, BigInt>> terms) {
    // collect by squarefree part
    std::map<BigInt, BigInt> by_part;
    for (auto& [coeff, rad] : terms) {
        if (coeff == 0 || rad == 0) continue;
        auto [s, f] = squarefree_split(rad);
        by_part[f] += coeff * s;
    }
    for (auto it = by_part.begin(); it != by_part.end();) {
        if (it->second == 0)
            it = by_part.erase(it);
        else
            ++it;
    }
    if (by_part.empty()) return 0;
    if (by_part.size() == 1) return by_part.begin()->second < 0 ? -1 : 1;

    // nonzero by linear independence of sqrt of distinct squarefree integers;
    // 100-digit evaluation is far more precision than the minimal gap needs
    // for the small radicands that arise from index-set budgets
    BigFloat acc = 0;
    for (const auto& [f, c] : by_part)
        acc += BigFloat(c) * sqrt(BigFloat(f));
    if (acc > 0) return 1;
    if (acc < 0) return -1;
    return 0; // unreachable for genuinely nonzero combinations
}

} // namespace dimincr
