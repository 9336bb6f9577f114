// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace xlmimo {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// exp(j*2*pi*turns) with the argument reduced to (-0.5, 0.5] first.
// Propagation phases reach ~1e7 cycles at tens of meters and millimeter
// wavelengths; reducing in units of full turns keeps the trig argument small.
inline cplx unit_phase(double turns) {
  turns -= std::round(turns);
  const double a = 2.0 * kPi * turns;
  return {std::cos(a), std::sin(a)};
}

// Column-major vectorization and its inverse. All vec/unvec in this library
// stack columns (Fortran order); the Kronecker identities rely on it.
inline CVec vec(const CMat& m) {
  return Eigen::Map<const CVec>(m.data(), m.size());
}

inline CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

// kron(a, b)[i*len(b) + j] = a[i] * b[j]
inline CVec kron(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace xlmimo
