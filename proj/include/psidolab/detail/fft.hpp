#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace psidolab::detail {

using cplx = std::complex<double>;

// Deterministic tree reduction. Summation order depends only on the length,
// so results are bit-reproducible regardless of caller context.
template <typename T>
T pairwise_sum(const T* data, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T acc = data[0];
        for (std::size_t i = 1; i < n; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v.data(), v.size());
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place radix-2 transform on contiguous data.
//   sign = -1:  out_k = sum_j in_j e^{-2*pi*i*j*k/n}
//   sign = +1:  out_k = sum_j in_j e^{+2*pi*i*j*k/n}
// Unnormalized. n must be a power of two.
inline void fft_pow2(cplx* a, std::size_t n, int sign) {
    if (n <= 1) return;
    if (!is_pow2(n))
        throw std::invalid_argument("fft: transform size must be a power of two, got " +
                                    std::to_string(n));
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx w = std::polar(1.0, ang * static_cast<double>(j));
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

// Applies op(line_ptr_with_stride) to every 1-D line along `axis` of a
// row-major array with `axes` axes of common length n.
template <typename F>
void for_each_line(std::vector<cplx>& v, int axes, std::size_t n, int axis, F&& op) {
    std::size_t inner = 1;
    for (int a = axes - 1; a > axis; --a) inner *= n;
    const std::size_t outer = v.size() / (inner * n);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i)
            op(v.data() + o * n * inner + i, inner);
}

// Centered exponential transform along one axis:
//   out_k = weight * sum_j v_j e^{sign * i * x_j * y_k},
// where x_j = (j - n/2)*sx, y_k = (k - n/2)*sy and sx*sy = 2*pi/n
// (a grid and its dual). Realized as ramped FFT; the ramps are exact +-1
// factors, so the identity holds to rounding.
inline void centered_axis_transform(std::vector<cplx>& v, int axes, std::size_t n, int axis,
                                    int sign, double weight) {
    const double parity = (n / 2) % 2 == 0 ? 1.0 : -1.0;  // e^{sign*i*pi*n/2}, n even
    std::vector<cplx> line(n);
    for_each_line(v, axes, n, axis, [&](cplx* base, std::size_t stride) {
        for (std::size_t j = 0; j < n; ++j)
            line[j] = (j % 2 == 0 ? base[j * stride] : -base[j * stride]);
        fft_pow2(line.data(), n, sign);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = (k % 2 == 0 ? 1.0 : -1.0) * parity * weight;
            base[k * stride] = line[k] * s;
        }
    });
}

// Translate f(x) -> f(x - s) along one axis of spacing `step`, treating the
// array as periodic. Integer shifts (s/step integral) are circular and exact;
// fractional shifts use the trigonometric interpolant. The Nyquist bin gets
// the symmetric cos multiplier so real inputs stay real; fractional shifts
// are exact exactly on Nyquist-free (band-limited) data.
inline void shift_axis(std::vector<cplx>& v, int axes, std::size_t n, int axis, double s,
                       double step) {
    if (s == 0.0) return;
    const double ratio = s / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) < 1e-9) {
        const std::ptrdiff_t m =
            ((static_cast<std::ptrdiff_t>(rounded) % static_cast<std::ptrdiff_t>(n)) +
             static_cast<std::ptrdiff_t>(n)) %
            static_cast<std::ptrdiff_t>(n);
        if (m == 0) return;
        std::vector<cplx> line(n);
        for_each_line(v, axes, n, axis, [&](cplx* base, std::size_t stride) {
            for (std::size_t j = 0; j < n; ++j) line[j] = base[j * stride];
            for (std::size_t j = 0; j < n; ++j)
                base[j * stride] = line[(j + n - static_cast<std::size_t>(m)) % n];
        });
        return;
    }
    std::vector<cplx> line(n);
    std::vector<cplx> mult(n);
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * step);
    for (std::size_t k = 0; k < n; ++k) {
        const std::ptrdiff_t kc = k < n / 2 ? static_cast<std::ptrdiff_t>(k)
                                            : static_cast<std::ptrdiff_t>(k) -
                                                  static_cast<std::ptrdiff_t>(n);
        const double w = dw * static_cast<double>(kc);
        if (kc == -static_cast<std::ptrdiff_t>(n / 2))
            mult[k] = std::cos(w * s);
        else
            mult[k] = std::polar(1.0, -w * s);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for_each_line(v, axes, n, axis, [&](cplx* base, std::size_t stride) {
        for (std::size_t j = 0; j < n; ++j) line[j] = base[j * stride];
        fft_pow2(line.data(), n, -1);
        for (std::size_t k = 0; k < n; ++k) line[k] *= mult[k];
        fft_pow2(line.data(), n, +1);
        for (std::size_t j = 0; j < n; ++j) base[j * stride] = line[j] * inv_n;
    });
}

// Spectral derivative/multiplier hook: multiply the plain-FFT bins along one
// axis by g(omega_k) where omega_k = 2*pi*k_c/(n*step). The Nyquist frequency
// is passed as -pi/step; callers decide its treatment.
template <typename G>
void spectral_multiply_axis(std::vector<cplx>& v, int axes, std::size_t n, int axis, double step,
                            G&& g) {
    std::vector<cplx> line(n);
    std::vector<cplx> mult(n);
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * step);
    for (std::size_t k = 0; k < n; ++k) {
        const std::ptrdiff_t kc = k < n / 2 ? static_cast<std::ptrdiff_t>(k)
                                            : static_cast<std::ptrdiff_t>(k) -
                                                  static_cast<std::ptrdiff_t>(n);
        mult[k] = g(dw * static_cast<double>(kc));
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for_each_line(v, axes, n, axis, [&](cplx* base, std::size_t stride) {
        for (std::size_t j = 0; j < n; ++j) line[j] = base[j * stride];
        fft_pow2(line.data(), n, -1);
        for (std::size_t k = 0; k < n; ++k) line[k] *= mult[k];
        fft_pow2(line.data(), n, +1);
        for (std::size_t j = 0; j < n; ++j) base[j * stride] = line[j] * inv_n;
    });
}

}  // namespace psidolab::detail
