#include "eitfwm/params.hpp"

namespace eitfwm {

void MediumParams::validate() const {
    auto fail = [](const std::string& m) { throw ValidationError("invalid medium: " + m); };
    if (!(alpha0L > 0)) fail("alpha0L must be > 0");
    if (!(gamma > 0)) fail("gamma must be > 0");
    if (!(gamma0 >= 0)) fail("gamma0 must be >= 0");
    if (!(delta_hf > 0)) fail("delta_hf must be > 0");
    if (!(omega >= 0)) fail("omega must be >= 0");
    if (!(gamma0 < gamma)) fail("gamma0 must be < gamma");
    if (!(length > 0)) fail("length must be > 0");
    if (!std::isfinite(delta) || !std::isfinite(clebsch_ratio)) fail("delta and clebsch_ratio must be finite");
}

double MediumParams::light_shift() const { return light_shift(omega); }

double MediumParams::light_shift(double omega_t) const {
    return clebsch_ratio * clebsch_ratio * omega_t * omega_t / delta_hf;
}

MediumParams MediumParams::with_compensated_shift() const {
    MediumParams q = *this;
    q.delta = light_shift();
    return q;
}

cplx MediumParams::Gamma0_at(double omega_t) const {
    return {gamma0, -(delta - light_shift(omega_t))};
}

cplx MediumParams::Gamma_at(double omega_t) const {
    return {gamma, -(delta - 2.0 * light_shift(omega_t))};
}

DerivedRates derive(const MediumParams& p) {
    p.validate();
    DerivedRates d;
    const double om2 = p.omega * p.omega;
    d.light_shift = p.light_shift();
    d.delta_R = -om2 / p.delta_hf;
    d.kappa2 = p.kappa2();
    d.kappa = std::sqrt(d.kappa2);
    d.v_g = om2 / d.kappa2;
    d.gamma_E = om2 / (p.gamma * std::sqrt(p.alpha0L / 2.0));
    d.Gamma0 = p.Gamma0_at(p.omega);
    d.Gamma = p.Gamma_at(p.omega);
    d.degenerate = p.omega == 0.0;
    d.gN_over_omega = d.degenerate ? INFINITY : d.kappa / p.omega;
    d.theta2 = d.degenerate ? INFINITY : d.kappa2 / om2;
    return d;
}

BreakdownInfo breakdown_flag(const MediumParams& p) {
    p.validate();
    BreakdownInfo b;
    // |Delta_R| / v_g = (omega^2/dhf) * kappa^2 / omega^2, finite even at omega = 0
    b.value = p.alpha0L * p.gamma / (2.0 * p.delta_hf);
    b.valid = b.value < 1.0;
    b.threshold_alpha0L = 2.0 * p.delta_hf / p.gamma;
    return b;
}

}  // namespace eitfwm
