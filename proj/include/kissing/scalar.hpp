#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace kissing {

// Runtime-precision real; digits are set per thread with DigitsGuard.
using Extended = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

template <class T>
using cplx = std::complex<T>;

using cd = std::complex<double>;

enum class Precision { Double, Extended, Auto };

Precision parse_precision(const std::string& s);
std::string to_string(Precision p);

class DigitsGuard {
public:
    explicit DigitsGuard(unsigned digits) : saved_(Extended::default_precision())
    {
        Extended::default_precision(digits);
    }
    ~DigitsGuard() { Extended::default_precision(saved_); }
    DigitsGuard(const DigitsGuard&) = delete;
    DigitsGuard& operator=(const DigitsGuard&) = delete;

private:
    unsigned saved_;
};

template <class T>
struct Num;

template <>
struct Num<double> {
    static double eps() { return std::numeric_limits<double>::epsilon(); }
    static double pi() { return M_PI; }
    static unsigned digits() { return 16; }
    static double from_string(const char* s) { return std::stod(s); }
};

template <>
struct Num<Extended> {
    static Extended eps()
    {
        return boost::multiprecision::pow(Extended(10), -static_cast<int>(Extended::default_precision()));
    }
    static Extended pi() { return boost::math::constants::pi<Extended>(); }
    static unsigned digits() { return Extended::default_precision(); }
    static Extended from_string(const char* s) { return Extended(s); }
};

inline double to_double(double x) { return x; }
inline double to_double(const Extended& x) { return x.convert_to<double>(); }
inline cd to_cd(const cd& z) { return z; }
inline cd to_cd(const cplx<Extended>& z) { return {to_double(z.real()), to_double(z.imag())}; }

template <class T>
cplx<T> lift(const cd& z)
{
    return cplx<T>(T(z.real()), T(z.imag()));
}

template <class T>
T real_abs(const T& x)
{
    using std::abs;
    using boost::multiprecision::abs;
    return abs(x);
}

}  // namespace kissing
