#pragma once

#include <cmath>
#include <type_traits>

namespace mslant {

// First-order forward-mode number: v + d*eps with eps^2 = 0. Nesting
// Dual<Dual<double>> carries two independent perturbations, which is how
// second derivatives are obtained.
template <class T>
struct Dual {
    T v{};
    T d{};

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit lift of constants
    constexpr Dual(T value, T derivative) : v(value), d(derivative) {}
};

template <class T>
constexpr double value_of(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x;
    } else {
        return value_of(x.v);
    }
}

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }

template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
}

template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    const T inv = T(1.0) / b.v;
    const T value = a.v * inv;
    return {value, (a.d - value * b.d) * inv};
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {sin(a.v), cos(a.v) * a.d};
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {cos(a.v), -(sin(a.v) * a.d)};
}

template <class T>
Dual<T> tan(const Dual<T>& a) {
    using std::tan;
    const T t = tan(a.v);
    return {t, (T(1.0) + t * t) * a.d};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    const T e = exp(a.v);
    return {e, e * a.d};
}

template <class T>
Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    const T s = sqrt(a.v);
    return {s, a.d / (T(2.0) * s)};
}

}  // namespace mslant
