#pragma once

#include <array>
#include <cassert>
#include <span>

namespace ctrap {

/// Truncated bivariate power series sum c_{jk} a^j b^k with total degree <= kMaxDegree.
///
/// Coefficients are stored by total degree: degree t occupies slots
/// t(t+1)/2 .. t(t+1)/2 + t, ordered by the b-exponent. `lo`/`hi` track the
/// range of total degrees that may be nonzero so products skip empty shells.
class BivariatePoly {
 public:
  static constexpr int kMaxDegree = 12;
  static constexpr int kSize = (kMaxDegree + 1) * (kMaxDegree + 2) / 2;

  static constexpr int index(int j, int k) {
    const int t = j + k;
    return t * (t + 1) / 2 + k;
  }

  BivariatePoly() = default;

  static BivariatePoly constant(double c) {
    BivariatePoly p;
    p.c_[0] = c;
    p.lo_ = 0;
    p.hi_ = 0;
    return p;
  }

  /// Univariate series in the first variable: sum s[j] a^j.
  static BivariatePoly in_a(std::span<const double> s) {
    BivariatePoly p;
    for (int j = 0; j < static_cast<int>(s.size()) && j <= kMaxDegree; ++j) p.c_[index(j, 0)] = s[j];
    p.lo_ = 0;
    p.hi_ = static_cast<int>(s.size()) - 1;
    if (p.hi_ > kMaxDegree) p.hi_ = kMaxDegree;
    return p;
  }

  /// Univariate series in the second variable: sum s[k] b^k.
  static BivariatePoly in_b(std::span<const double> s) {
    BivariatePoly p;
    for (int k = 0; k < static_cast<int>(s.size()) && k <= kMaxDegree; ++k) p.c_[index(0, k)] = s[k];
    p.lo_ = 0;
    p.hi_ = static_cast<int>(s.size()) - 1;
    if (p.hi_ > kMaxDegree) p.hi_ = kMaxDegree;
    return p;
  }

  double operator()(int j, int k) const {
    if (j < 0 || k < 0 || j + k > hi_ || j + k < lo_) return 0.0;
    return c_[index(j, k)];
  }

  void set(int j, int k, double v) {
    assert(j >= 0 && k >= 0 && j + k <= kMaxDegree);
    const int t = j + k;
    if (empty()) {
      c_.fill(0.0);
      lo_ = hi_ = t;
    } else {
      zero_shells(t < lo_ ? t : lo_, t > hi_ ? t : hi_);
    }
    c_[index(j, k)] = v;
  }

  bool empty() const { return hi_ < lo_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }

  /// Drop every term outside total degree [lo, hi].
  BivariatePoly truncated(int lo, int hi) const {
    BivariatePoly r;
    const int l = lo > lo_ ? lo : lo_;
    const int h = hi < hi_ ? hi : hi_;
    if (l > h) return r;
    r.lo_ = l;
    r.hi_ = h;
    for (int t = l; t <= h; ++t)
      for (int k = 0; k <= t; ++k) r.c_[index(t - k, k)] = c_[index(t - k, k)];
    return r;
  }

  BivariatePoly& operator+=(const BivariatePoly& o) {
    if (o.empty()) return *this;
    if (empty()) return *this = o;
    const int l = lo_ < o.lo_ ? lo_ : o.lo_;
    const int h = hi_ > o.hi_ ? hi_ : o.hi_;
    zero_shells(l, h);
    for (int t = o.lo_; t <= o.hi_; ++t)
      for (int k = 0; k <= t; ++k) c_[index(t - k, k)] += o.c_[index(t - k, k)];
    return *this;
  }

  BivariatePoly& operator-=(const BivariatePoly& o) {
    BivariatePoly neg = o;
    neg *= -1.0;
    return *this += neg;
  }

  BivariatePoly& operator*=(double s) {
    for (int t = lo_; t <= hi_; ++t)
      for (int k = 0; k <= t; ++k) c_[index(t - k, k)] *= s;
    return *this;
  }

  /// Truncated product keeping total degree <= cap.
  static BivariatePoly multiply(const BivariatePoly& a, const BivariatePoly& b, int cap = kMaxDegree) {
    BivariatePoly r;
    if (a.empty() || b.empty()) return r;
    const int lo = a.lo_ + b.lo_;
    int hi = a.hi_ + b.hi_;
    if (hi > cap) hi = cap;
    if (lo > hi) return r;
    r.lo_ = lo;
    r.hi_ = hi;
    for (int ta = a.lo_; ta <= a.hi_; ++ta) {
      for (int tb = b.lo_; tb <= b.hi_ && ta + tb <= hi; ++tb) {
        for (int ka = 0; ka <= ta; ++ka) {
          const double ca = a.c_[index(ta - ka, ka)];
          if (ca == 0.0) continue;
          const int ja = ta - ka;
          for (int kb = 0; kb <= tb; ++kb)
            r.c_[index(ja + tb - kb, ka + kb)] += ca * b.c_[index(tb - kb, kb)];
        }
      }
    }
    return r;
  }

  /// Square root of a series with positive constant term, truncated at cap.
  static BivariatePoly sqrt(const BivariatePoly& s, int cap);

  /// Evaluate at (a, b).
  double eval(double a, double b) const {
    double total = 0.0;
    for (int t = lo_; t <= hi_; ++t)
      for (int k = 0; k <= t; ++k) {
        const double cjk = c_[index(t - k, k)];
        if (cjk == 0.0) continue;
        double term = cjk;
        for (int i = 0; i < t - k; ++i) term *= a;
        for (int i = 0; i < k; ++i) term *= b;
        total += term;
      }
    return total;
  }

 private:
  void zero_shells(int l, int h) {
    for (int t = l; t <= h; ++t) {
      if (t >= lo_ && t <= hi_) continue;
      for (int k = 0; k <= t; ++k) c_[index(t - k, k)] = 0.0;
    }
    lo_ = l;
    hi_ = h;
  }

  std::array<double, kSize> c_{};
  int lo_ = 0;
  int hi_ = -1;
};

inline BivariatePoly operator+(BivariatePoly a, const BivariatePoly& b) { return a += b; }
inline BivariatePoly operator-(BivariatePoly a, const BivariatePoly& b) { return a -= b; }
inline BivariatePoly operator*(double s, BivariatePoly a) { return a *= s; }
inline BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
  return BivariatePoly::multiply(a, b);
}

}  // namespace ctrap
