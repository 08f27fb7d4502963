#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace star {

using Rat = boost::multiprecision::cpp_rational;

// Complex number over exact rationals, for the bit-exact algebra layer.
struct RatC {
    Rat re{0};
    Rat im{0};

    RatC() = default;
    RatC(long n) : re(n) {}
    RatC(Rat r) : re(std::move(r)) {}
    RatC(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    static RatC i() { return RatC(Rat(0), Rat(1)); }

    bool is_zero() const { return re == 0 && im == 0; }

    RatC operator-() const { return RatC(-re, -im); }
    RatC& operator+=(const RatC& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    RatC& operator-=(const RatC& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend RatC operator+(RatC a, const RatC& b) { return a += b; }
    friend RatC operator-(RatC a, const RatC& b) { return a -= b; }
    friend RatC operator*(const RatC& a, const RatC& b) {
        return RatC(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    RatC& operator*=(const RatC& o) { return *this = *this * o; }
    friend RatC operator/(const RatC& a, const RatC& b) {
        Rat d = b.re * b.re + b.im * b.im;
        return RatC((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
    }
    friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }

    std::string str() const {
        return "(" + re.str() + (im >= 0 ? "+" : "") + im.str() + "i)";
    }
};

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<RatC> {
    static bool is_zero(const RatC& c) { return c.is_zero(); }
    static RatC zero() { return RatC(); }
    static RatC one() { return RatC(1); }
    static RatC from_int(long k) { return RatC(k); }
};

template <>
struct scalar_traits<std::complex<double>> {
    static bool is_zero(const std::complex<double>& c) { return c == std::complex<double>(0.0); }
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> one() { return {1.0, 0.0}; }
    static std::complex<double> from_int(long k) { return {double(k), 0.0}; }
};

}  // namespace star
