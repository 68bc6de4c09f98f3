#pragma once

namespace iecsi {

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `df` > 0 degrees of freedom.
double student_t_two_sided_p(double t, double df);

// P(T <= t).
double student_t_cdf(double t, double df);

// P(|Z| >= |z|) for the standard normal.
double normal_two_sided_p(double z);

}  // namespace iecsi
