#pragma once

#include "thermo/basis.hpp"

namespace thermo {

// Exact value of \int_0^pi f(x) g(x) dx for single trig terms.
double inner_exact(const TrigTerm& f, const TrigTerm& g);

// Composite Gauss-Legendre (64 points per wavelength). Only used to
// cross-check inner_exact.
double inner_quadrature(const TrigTerm& f, const TrigTerm& g);

// Exact \int_lo^hi f(x) dx.
double integral_exact(const TrigTerm& f, double lo, double hi);

}  // namespace thermo
