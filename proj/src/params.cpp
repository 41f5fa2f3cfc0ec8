#include "muskat/params.hpp"

#include <cmath>
#include <string>

#include "muskat/errors.hpp"

namespace muskat {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidConfiguration(what);
}

}  // namespace

FluidParams FluidParams::normalized(double a_mu, double theta, double sigma) {
    require(std::abs(a_mu) < 1.0, "normalized parameters need |a_mu| < 1");
    FluidParams p;
    p.k = 1.0;
    p.mu_minus = 1.0 + a_mu;
    p.mu_plus = 1.0 - a_mu;
    p.g = 1.0;
    p.rho_minus = theta > 0.0 ? theta : 0.0;
    p.rho_plus = theta < 0.0 ? -theta : 0.0;
    p.sigma = sigma;
    p.V = 0.0;
    return p;
}

void FluidParams::validate() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    require(finite(mu_minus) && finite(mu_plus) && finite(rho_minus) && finite(rho_plus) &&
                finite(g) && finite(k) && finite(sigma) && finite(V),
            "fluid parameters must be finite");
    require(mu_minus > 0.0, "mu_minus must be positive");
    require(mu_plus > 0.0, "mu_plus must be positive");
    require(rho_minus >= 0.0, "rho_minus must be nonnegative");
    require(rho_plus >= 0.0, "rho_plus must be nonnegative");
    require(g >= 0.0, "g must be nonnegative");
    require(k > 0.0, "k must be positive");
    require(sigma >= 0.0, "sigma must be nonnegative");
}

DerivedConstants derive_constants(const FluidParams& p) {
    const double mu_sum = p.mu_minus + p.mu_plus;
    if (!(mu_sum > 0.0)) throw InvalidConfiguration("mu_minus + mu_plus must be positive");
    if (!(p.k > 0.0)) throw InvalidConfiguration("k must be positive");

    DerivedConstants c;
    c.a_mu = (p.mu_minus - p.mu_plus) / mu_sum;
    c.b_mu = 2.0 * p.k / mu_sum;
    c.theta = p.g * (p.rho_minus - p.rho_plus) + (p.mu_minus - p.mu_plus) * p.V / p.k;
    c.c_rho_mu = 2.0 * p.k * c.theta / mu_sum;
    if (!(std::abs(c.a_mu) < 1.0)) throw InvalidConfiguration("Atwood number must satisfy |a_mu| < 1");
    return c;
}

}  // namespace muskat
