#ifndef TFCKA_SPECIAL_MATH_HPP
#define TFCKA_SPECIAL_MATH_HPP

#include <stdexcept>

namespace tfcka {

// Shared tolerance constants. Tests and implementation use the same values.
inline constexpr double kDomainSlack = 1e-12;       // slack on [0,1] domain checks
inline constexpr double kSpecialFnRelTol = 1e-13;   // ln_gamma relative accuracy
inline constexpr double kProbabilityBugTol = 1e-9;  // pre-clamp violation = bug

/// A real number constrained to [0,1]. Values within kDomainSlack of the
/// interval are clamped; anything further out throws.
class Probability {
public:
    Probability() = default;
    explicit Probability(double v);

    double value() const { return v_; }
    operator double() const { return v_; }

private:
    double v_ = 0.0;
};

/// Binary entropy h(x) in bits, with the continuous extension h(0)=h(1)=0.
double binary_entropy(double x);

/// Natural log of the gamma function for x > 0.
double ln_gamma(double x);

/// ln Gamma(a+1) - ln Gamma(c+1) for a >= c >= 0, evaluated without the
/// catastrophic cancellation of subtracting two huge lgamma values.
double ln_gamma_diff(double a, double c);

/// Generalized log-binomial ln C(a,b) = ln G(a+1) - ln G(b+1) - ln G(a-b+1),
/// for real a >= b >= 0.
double ln_binomial(double a, double b);

/// Clamps v to [0,1]; throws std::logic_error if it is outside by more than
/// kProbabilityBugTol (an accumulation bug, not roundoff).
double clamp_probability(double v, const char* what);

} // namespace tfcka

#endif
