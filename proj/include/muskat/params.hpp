#pragma once

namespace muskat {

/// Physical configuration of the two-phase Hele-Shaw / porous medium flow.
///
/// The "minus" fluid occupies the region below the interface, the "plus"
/// fluid the region above it. Values are SI by convention (Pa s, kg/m^3,
/// m/s^2, m^2, N/m, m/s) but the library never checks units: after the
/// derived constants are formed everything is a plain real number.
struct FluidParams {
    double mu_minus = 1.0;
    double mu_plus = 1.0;
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    double g = 0.0;
    double k = 1.0;  ///< permeability
    double sigma = 0.0;
    double V = 0.0;  ///< far-field vertical speed

    /// Parameters with b_mu = 2k/(mu_- + mu_+) = 1 and the requested Atwood
    /// number, buoyancy constant Theta and surface tension (sigma = 1 unless
    /// overridden). Gravity is 1 and V = 0, so Theta is carried by the
    /// density jump.
    static FluidParams normalized(double a_mu, double theta, double sigma = 1.0);

    /// Throws InvalidConfiguration when an invariant is violated.
    void validate() const;
};

struct DerivedConstants {
    double a_mu = 0.0;      ///< Atwood number (mu_- - mu_+)/(mu_- + mu_+)
    double b_mu = 0.0;      ///< 2k/(mu_- + mu_+)
    double theta = 0.0;     ///< g(rho_- - rho_+) + (mu_- - mu_+)V/k
    double c_rho_mu = 0.0;  ///< b_mu * theta
};

DerivedConstants derive_constants(const FluidParams& p);

}  // namespace muskat
