#include "opshift/laurent.hpp"

#include <algorithm>
#include <cmath>

namespace opshift {

LaurentPoly::LaurentPoly(int nmin, std::vector<Complex> coeffs)
    : nmin_(nmin), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    nmin_ = 0;
    coeffs_.assign(1, Complex(0.0));
  }
}

LaurentPoly LaurentPoly::monomial(int n, Complex a) {
  return LaurentPoly(n, {a});
}

LaurentPoly LaurentPoly::constant(Complex a) { return LaurentPoly(0, {a}); }

Complex LaurentPoly::coeff(int n) const {
  const int idx = n - nmin_;
  if (idx < 0 || idx >= static_cast<int>(coeffs_.size())) return Complex(0.0);
  return coeffs_[static_cast<std::size_t>(idx)];
}

bool LaurentPoly::analytic() const {
  for (int n = nmin_; n < 0; ++n) {
    if (coeff(n) != Complex(0.0)) return false;
  }
  return true;
}

bool LaurentPoly::is_zero(double tol) const {
  for (const Complex& c : coeffs_) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

Complex LaurentPoly::operator()(Complex z) const {
  // Horner on the nonnegative part, Horner in 1/z on the negative part. Both
  // recursions must run all the way to degree 0 (resp. -1) even when the
  // stored range starts higher, so the accumulated value picks up the full
  // power of z; coeff() returns 0 outside the stored range.
  Complex pos(0.0), neg(0.0);
  const int nmax = max_degree();
  for (int n = nmax; n >= 0; --n) pos = pos * z + coeff(n);
  if (nmin_ < 0) {
    if (std::abs(z) == 0.0) {
      throw InputError("LaurentPoly: negative powers evaluated at 0");
    }
    const Complex zi = Complex(1.0) / z;
    for (int n = nmin_; n <= -1; ++n) neg = neg * zi + coeff(n);
    neg *= zi;
  }
  return pos + neg;
}

LaurentPoly LaurentPoly::derivative() const {
  const int nmax = max_degree();
  std::vector<Complex> out;
  int outMin = nmin_ - 1;
  for (int n = nmin_; n <= nmax; ++n) {
    out.push_back(static_cast<double>(n) * coeff(n));
  }
  return LaurentPoly(outMin, std::move(out)).trimmed();
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  const int lo = std::min(nmin_, o.nmin_);
  const int hi = std::max(max_degree(), o.max_degree());
  std::vector<Complex> out(static_cast<std::size_t>(hi - lo + 1), Complex(0.0));
  for (int n = lo; n <= hi; ++n) {
    out[static_cast<std::size_t>(n - lo)] = coeff(n) + o.coeff(n);
  }
  return LaurentPoly(lo, std::move(out));
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
  return *this + o * Complex(-1.0);
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  const int lo = nmin_ + o.nmin_;
  const int hi = max_degree() + o.max_degree();
  std::vector<Complex> out(static_cast<std::size_t>(hi - lo + 1), Complex(0.0));
  for (int a = nmin_; a <= max_degree(); ++a) {
    for (int b = o.nmin_; b <= o.max_degree(); ++b) {
      out[static_cast<std::size_t>(a + b - lo)] += coeff(a) * o.coeff(b);
    }
  }
  return LaurentPoly(lo, std::move(out));
}

LaurentPoly LaurentPoly::operator*(Complex a) const {
  std::vector<Complex> out = coeffs_;
  for (Complex& c : out) c *= a;
  return LaurentPoly(nmin_, std::move(out));
}

LaurentPoly LaurentPoly::trimmed(double tol) const {
  int lo = nmin_;
  int hi = max_degree();
  while (lo < hi && std::abs(coeff(lo)) <= tol) ++lo;
  while (hi > lo && std::abs(coeff(hi)) <= tol) --hi;
  if (lo == hi && std::abs(coeff(lo)) <= tol) return LaurentPoly();
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int n = lo; n <= hi; ++n) out.push_back(coeff(n));
  return LaurentPoly(lo, std::move(out));
}

Complex divided_difference(const LaurentPoly& f, Complex z, Complex w,
                           double diagTol) {
  if (std::abs(z - w) >= diagTol) {
    return (f(z) - f(w)) / (z - w);
  }
  const LaurentPoly g = f.trimmed();
  if (g.min_degree() < 0 && std::min(std::abs(z), std::abs(w)) < 1e-12) {
    throw InputError("divided_difference: negative powers near 0");
  }
  Complex acc(0.0);
  for (int n = g.min_degree(); n <= g.max_degree(); ++n) {
    const Complex a = g.coeff(n);
    if (a == Complex(0.0) || n == 0) continue;
    Complex d(0.0);
    if (n > 0) {
      for (int j = 0; j < n; ++j) {
        d += std::pow(z, j) * std::pow(w, n - 1 - j);
      }
    } else {
      const int m = -n;
      for (int j = 1; j <= m; ++j) {
        d -= std::pow(z, -j) * std::pow(w, -(m + 1 - j));
      }
    }
    acc += a * d;
  }
  return acc;
}

std::vector<HaagerupTerm> haagerup_terms(const LaurentPoly& f) {
  const LaurentPoly g = f.trimmed();
  if (!g.analytic()) {
    throw InputError("haagerup_terms: analytic polynomial required");
  }
  const int deg = g.max_degree();
  std::vector<HaagerupTerm> terms;
  for (int k = 0; k + 1 <= deg; ++k) {
    // Coefficient of w^k in the divided difference: phi_k(z) = sum over
    // n >= k+1 of a_n z^(n-1-k).
    std::vector<Complex> phi(static_cast<std::size_t>(deg - k), Complex(0.0));
    bool nonzero = false;
    for (int n = k + 1; n <= deg; ++n) {
      const Complex a = g.coeff(n);
      phi[static_cast<std::size_t>(n - 1 - k)] = a;
      if (a != Complex(0.0)) nonzero = true;
    }
    if (!nonzero) continue;
    terms.push_back({LaurentPoly(0, std::move(phi)), LaurentPoly::monomial(k)});
  }
  return terms;
}

}  // namespace opshift
