#pragma once

#include <qha/lattice.hpp>

#include <algorithm>
#include <complex>
#include <span>
#include <vector>

namespace qha {

using cplx = std::complex<double>;

/// A function on the phase-space lattice, stored row-major in (m, n).
template <class T> class Grid {
public:
  using value_type = T;

  explicit Grid(PhaseLattice lat, T fill = T{}) : lat_(lat), data_(lat.size(), fill) {}

  const PhaseLattice &lattice() const noexcept { return lat_; }
  int N() const noexcept { return lat_.N(); }
  std::size_t size() const noexcept { return data_.size(); }

  T &operator()(int m, int n) { return data_[lat_.index(m, n)]; }
  const T &operator()(int m, int n) const { return data_[lat_.index(m, n)]; }
  T &operator[](std::size_t i) { return data_[i]; }
  const T &operator[](std::size_t i) const { return data_[i]; }
  T &at(LatticePoint z) { return data_[lat_.index(z)]; }
  const T &at(LatticePoint z) const { return data_[lat_.index(z)]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  /// w * sum of all values.
  T integral() const {
    T s{};
    for (const auto &v : data_)
      s += v;
    return s * lat_.weight();
  }

  /// g(z) = f(-z).
  Grid reflected() const {
    Grid out(lat_);
    const int N = lat_.N();
    for (int m = 0; m < N; ++m)
      for (int n = 0; n < N; ++n)
        out(m, n) = (*this)(-m, -n);
    return out;
  }

  Grid &operator+=(const Grid &o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += o.data_[i];
    return *this;
  }
  Grid &operator-=(const Grid &o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] -= o.data_[i];
    return *this;
  }
  Grid &operator*=(T s) {
    for (auto &v : data_)
      v *= s;
    return *this;
  }
  friend Grid operator+(Grid a, const Grid &b) { return a += b; }
  friend Grid operator-(Grid a, const Grid &b) { return a -= b; }

  bool operator==(const Grid &) const = default;

private:
  void check_same(const Grid &o) const {
    if (!(o.lat_ == lat_))
      throw DimensionMismatch("grids live on different lattices");
  }

  PhaseLattice lat_;
  std::vector<T> data_;
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<cplx>;

/// chi_Omega as a grid of zeros and ones.
inline RealGrid indicator(const Domain &d) {
  RealGrid g(d.lattice());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = d.contains_index(i) ? 1.0 : 0.0;
  return g;
}

inline RealGrid real_part(const ComplexGrid &g) {
  RealGrid out(g.lattice());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = g[i].real();
  return out;
}

inline ComplexGrid to_complex(const RealGrid &g) {
  ComplexGrid out(g.lattice());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = g[i];
  return out;
}

template <class T> double max_abs(const Grid<T> &g) {
  double r = 0;
  for (const auto &v : g.values())
    r = std::max(r, static_cast<double>(std::abs(v)));
  return r;
}

template <class T> double max_abs_diff(const Grid<T> &a, const Grid<T> &b) {
  if (!(a.lattice() == b.lattice()))
    throw DimensionMismatch("grids live on different lattices");
  double r = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    r = std::max(r, static_cast<double>(std::abs(a[i] - b[i])));
  return r;
}

inline double min_value(const RealGrid &g) {
  return *std::min_element(g.values().begin(), g.values().end());
}
inline double max_value(const RealGrid &g) {
  return *std::max_element(g.values().begin(), g.values().end());
}

} // namespace qha
