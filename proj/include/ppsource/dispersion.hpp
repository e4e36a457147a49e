#pragma once

#include <cmath>
#include <optional>

#include "ppsource/errors.hpp"
#include "ppsource/sellmeier.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

struct CrystalSpec {
    double length = 0.0;          // m
    double poling_period = 0.0;   // m
    double temperature = 0.0;     // C
    SellmeierSet sellmeier;
    // The poled region can be shorter than the physical crystal; when set it
    // replaces the length in the phase-matching kernel and the overlap
    // coefficients.
    std::optional<double> poling_length;

    double effective_length() const { return poling_length.value_or(length); }

    void validate() const {
        if (!(length > 0.0))
            throw ConsistencyError("crystal length must be positive");
        if (!(poling_period > 0.0))
            throw ConsistencyError("poling period must be positive");
        if (poling_length && !(*poling_length > 0.0 && *poling_length <= length))
            throw ConsistencyError("poling length must be positive and no longer than the crystal");
        sellmeier.validate();
        detail::check_temperature(temperature, sellmeier);
    }
};

// Group-delay-per-length terms and the angular combinations entering the
// overlap coefficients. All angles are internal; D_pi is computed and exposed
// although nothing downstream consumes it.
struct DispersionTerms {
    double D_i = 0.0;      // s/m, at the idler frequency
    double D_s = 0.0;      // s/m, at the signal frequency
    double D_p = 0.0;      // s/m, at the pump frequency
    double D_is = 0.0;     // s/m
    double D_pi = 0.0;     // s/m
    double alpha_s = 0.0;  // dimensionless
};

inline DispersionTerms dispersion_terms(const CrystalSpec& crystal,
                                        double omega_p, double omega_s, double omega_i,
                                        double theta_s, double theta_i) {
    if (std::abs(omega_p - (omega_s + omega_i)) > 1e-9 * omega_p)
        throw ConsistencyError("energy conservation violated: omega_p != omega_s + omega_i");
    if (!(std::abs(theta_s) < pi / 2.0) || !(std::abs(theta_i) < pi / 2.0))
        throw DomainError("internal angles must satisfy |theta| < pi/2");

    const double T = crystal.temperature;
    const auto& set = crystal.sellmeier;
    DispersionTerms d;
    d.D_p = group_term(m_to_nm(lambda_from_omega(omega_p)), T, set);
    d.D_s = group_term(m_to_nm(lambda_from_omega(omega_s)), T, set);
    d.D_i = group_term(m_to_nm(lambda_from_omega(omega_i)), T, set);

    const double cs = std::cos(theta_s), ss = std::sin(theta_s), ts = std::tan(theta_s);
    const double ci = std::cos(theta_i), si = std::sin(theta_i), ti = std::tan(theta_i);
    d.D_is = d.D_i * (ci - si * ti) - d.D_s * (cs + ss * ts);
    d.D_pi = -d.D_i * (ci + si * ti) + d.D_p;
    d.alpha_s = -cs * ti + ss;
    return d;
}

}  // namespace ppsource
