#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dimincr {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational, always reduced, denominator > 0. Used for search-space
// budget comparisons where floating point could misclassify boundary indices.
class Rat {
  public:
    Rat() : num_(0), den_(1) {}
    Rat(long long n) : num_(n), den_(1) {}
    Rat(BigInt n, BigInt d);

    // exact value of the double (every finite double is rational)
    static Rat from_double(double x);
    // "0.5", "-3", "1/3", "2e3" (integral mantissa scaling only)
    static Rat from_string(const std::string& s);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    double to_double() const;
    std::string to_string() const;

    Rat operator+(const Rat& o) const { return Rat(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
    Rat operator-(const Rat& o) const { return Rat(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
    Rat operator*(const Rat& o) const { return Rat(num_ * o.num_, den_ * o.den_); }
    Rat operator/(const Rat& o) const { return Rat(num_ * o.den_, den_ * o.num_); }

    Rat pow(unsigned e) const;

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator<(const Rat& a, const Rat& b) { return a.num_ * b.den_ < b.num_ * a.den_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.num_ * b.den_ <= b.num_ * a.den_; }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  private:
    BigInt num_, den_;
};

// Sign of sum(coeff_i * sqrt(radicand_i)) with integer coefficients and
// nonnegative integer radicands. Exact: square roots of distinct squarefree
// integers are linearly independent over the rationals, so after collecting
// by squarefree part the combination is zero iff every coefficient is zero;
// otherwise a high-precision evaluation determines the sign.
int sqrt_combination_sign(std::vector<std::pair<BigInt, BigInt>> terms);

// radicand -> (square part s, squarefree part f) with radicand = s^2 * f
std::pair<BigInt, BigInt> squarefree_split(const BigInt& radicand);

} // namespace dimincr
