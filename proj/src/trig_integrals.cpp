#include "thermo/trig_integrals.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace thermo {

namespace {

constexpr double kPi = std::numbers::pi;

// \int_0^pi sin(i x) cos(j x) dx for integers i, j >= 0.
double sin_cos(int i, int j) {
  if (i == 0) return 0.0;
  if (i == j) return 0.0;
  if ((i + j) % 2 == 0) return 0.0;
  return 2.0 * i / (static_cast<double>(i) * i - static_cast<double>(j) * j);
}

double sin_sin(int i, int j) {
  if (i == 0 || j == 0) return 0.0;
  return i == j ? kPi / 2.0 : 0.0;
}

double cos_cos(int i, int j) {
  if (i != j) return 0.0;
  return i == 0 ? kPi : kPi / 2.0;
}

}  // namespace

double inner_exact(const TrigTerm& f, const TrigTerm& g) {
  // Frequencies enter only through sin/cos, so negative ones fold by parity.
  int i = std::abs(f.freq), j = std::abs(g.freq);
  double sign = 1.0;
  if (f.freq < 0 && f.kind == Trig::Sin) sign = -sign;
  if (g.freq < 0 && g.kind == Trig::Sin) sign = -sign;
  const double scale = sign * f.amp * g.amp;

  if (f.kind == Trig::Sin && g.kind == Trig::Sin) return scale * sin_sin(i, j);
  if (f.kind == Trig::Cos && g.kind == Trig::Cos) return scale * cos_cos(i, j);
  if (f.kind == Trig::Sin) return scale * sin_cos(i, j);
  return scale * sin_cos(j, i);
}

double inner_quadrature(const TrigTerm& f, const TrigTerm& g) {
  using boost::math::quadrature::gauss;
  // 16-point rule, 4 panels per wavelength of the faster factor.
  const int fmax = std::max({std::abs(f.freq), std::abs(g.freq), 1});
  const int panels = 2 * fmax + 2;
  const double h = kPi / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    total += gauss<double, 16>::integrate(
        [&](double x) { return f.value(x) * g.value(x); }, lo, lo + h);
  }
  return total;
}

double integral_exact(const TrigTerm& f, double lo, double hi) {
  const double k = f.freq;
  if (f.kind == Trig::Sin) {
    if (k == 0) return 0.0;
    return f.amp * (std::cos(k * lo) - std::cos(k * hi)) / k;
  }
  if (k == 0) return f.amp * (hi - lo);
  return f.amp * (std::sin(k * hi) - std::sin(k * lo)) / k;
}

}  // namespace thermo
