#include "opshift/gridfn.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

#include "opshift/quadrature.hpp"

namespace opshift {

namespace {

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

GridFunction::GridFunction(int m, bool shifted)
    : shifted_(shifted), values_(Vector::Zero(m)) {
  if (!power_of_two(m)) {
    throw InputError("GridFunction: grid size must be a power of two");
  }
}

GridFunction GridFunction::from_values(Vector values, bool shifted) {
  GridFunction g(static_cast<int>(values.size()), shifted);
  g.values_ = std::move(values);
  return g;
}

double GridFunction::theta(int k) const { return circle_node(k, size(), shifted_); }

Complex GridFunction::zeta(int k) const {
  const double th = theta(k);
  return Complex(std::cos(th), std::sin(th));
}

Complex GridFunction::mean() const {
  return values_.size() > 0 ? Complex(values_.mean()) : Complex(0.0);
}

Vector GridFunction::fourier_coefficients() const {
  const int m = size();
  Eigen::FFT<double> fft;
  std::vector<Complex> in(values_.data(), values_.data() + m);
  std::vector<Complex> spec(m);
  fft.fwd(spec, in);
  // Coefficient of z^n sits at FFT bin n mod m, scaled by 1/m, with the grid
  // shift unwound; output index i holds n = i - m/2 ascending.
  Vector out(m);
  const double s = shifted_ ? 0.5 : 0.0;
  for (int i = 0; i < m; ++i) {
    const int n = i - m / 2;
    const int bin = (n + m) % m;
    const double phase = -kTwoPi * n * s / m;
    out(i) = spec[static_cast<std::size_t>(bin)] / static_cast<double>(m) *
             Complex(std::cos(phase), std::sin(phase));
  }
  return out;
}

GridFunction GridFunction::from_coefficients(const Vector& coeffs, bool shifted) {
  const int m = static_cast<int>(coeffs.size());
  if (!power_of_two(m)) {
    throw InputError("GridFunction: coefficient count must be a power of two");
  }
  const double s = shifted ? 0.5 : 0.0;
  std::vector<Complex> spec(m);
  for (int i = 0; i < m; ++i) {
    const int n = i - m / 2;
    const int bin = (n + m) % m;
    const double phase = kTwoPi * n * s / m;
    spec[static_cast<std::size_t>(bin)] =
        coeffs(i) * Complex(std::cos(phase), std::sin(phase)) *
        static_cast<double>(m);
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> vals(m);
  fft.inv(vals, spec);
  Vector v(m);
  for (int k = 0; k < m; ++k) v(k) = vals[static_cast<std::size_t>(k)];
  return from_values(std::move(v), shifted);
}

GridFunction GridFunction::riesz_positive() const {
  Vector c = fourier_coefficients();
  const int m = size();
  for (int i = 0; i < m; ++i) {
    if (i - m / 2 < 0) c(i) = Complex(0.0);
  }
  return from_coefficients(c, shifted_);
}

GridFunction GridFunction::riesz_negative() const {
  Vector c = fourier_coefficients();
  const int m = size();
  for (int i = 0; i < m; ++i) {
    if (i - m / 2 >= 0) c(i) = Complex(0.0);
  }
  return from_coefficients(c, shifted_);
}

AIntegralResult a_integral(const GridFunction& g,
                           const std::vector<double>& thresholds) {
  if (thresholds.size() < 2) {
    throw InputError("a_integral: need an ascending threshold ladder");
  }
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw InputError("a_integral: thresholds must ascend");
    }
  }
  AIntegralResult out;
  out.thresholds = thresholds;
  const int m = g.size();
  for (double t : thresholds) {
    Complex acc(0.0);
    int tail = 0;
    for (int k = 0; k < m; ++k) {
      if (std::abs(g[k]) < t) {
        acc += g[k];
      } else {
        ++tail;
      }
    }
    out.truncated.push_back(acc / static_cast<double>(m));
    out.tailProducts.push_back(t * static_cast<double>(tail) /
                               static_cast<double>(m));
  }
  out.value = out.truncated.back();
  const std::size_t last = thresholds.size() - 1;
  const double diff = std::abs(out.truncated[last] - out.truncated[last - 1]);
  const bool tailsTame =
      out.tailProducts[last] <= out.tailProducts[last - 1] * (1.0 + 1e-6) + 1e-12;
  out.converged =
      diff <= 1e-6 * (1.0 + std::abs(out.value)) && tailsTame;
  return out;
}

GridFunction realize_real_ssf(const GridFunction& xi) {
  // Keep all negative Fourier modes, mirror them conjugately onto the
  // positive side, and make the mean real. The result is a real function
  // whose difference from xi has nonnegative modes only (up to the
  // unmatched Nyquist bin).
  Vector c = xi.fourier_coefficients();
  const int m = xi.size();
  Vector cr = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    const int n = i - m / 2;
    if (n < 0) {
      cr(i) = c(i);
    } else if (n == 0) {
      cr(i) = Complex(c(i).real(), 0.0);
    } else {
      cr(i) = std::conj(c(m / 2 - n));
    }
  }
  return GridFunction::from_coefficients(cr, xi.shifted());
}

}  // namespace opshift
