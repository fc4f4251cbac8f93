#pragma once

namespace ballnls {

/// Sine integral Si(x) = int_0^x sin(t)/t dt, accurate to a few ulps.
double sine_integral(double x);

}  // namespace ballnls
