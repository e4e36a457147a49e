#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ppsource/errors.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

// Coefficient sets are data, never hard-coded physics: the shipped default is
// the published congruent-LiNbO3 extraordinary-ray set with temperature
// dependence, and tests use tiny constant-index sets.
//
// Forms:
//   "constant"              n = c0 everywhere (temperature ignored)
//   "temperature_two_pole"  n^2 = (c0 + t0 f) + (c1 + t1 f)/(L2 - (c2 + t2 f)^2)
//                               + (c3 + t3 f)/(L2 - c4^2) - c5 L2
//                           with L2 = lambda_um^2 and f = (T - t4)(T + t5)
enum class SellmeierForm { constant, temperature_two_pole };

struct SellmeierSet {
    std::string name;
    SellmeierForm form = SellmeierForm::constant;
    std::vector<double> coefficients;
    std::vector<double> temperature_model;
    double valid_wavelength_min_nm = 0.0;
    double valid_wavelength_max_nm = 0.0;
    double valid_temperature_min_C = 0.0;
    double valid_temperature_max_C = 0.0;

    void validate() const {
        if (valid_wavelength_min_nm <= 0.0 || valid_wavelength_max_nm <= valid_wavelength_min_nm)
            throw ConsistencyError("sellmeier set '" + name + "': bad wavelength validity range");
        if (valid_temperature_max_C <= valid_temperature_min_C)
            throw ConsistencyError("sellmeier set '" + name + "': bad temperature validity range");
        const std::size_t nc = coefficients.size();
        const std::size_t nt = temperature_model.size();
        switch (form) {
            case SellmeierForm::constant:
                if (nc != 1)
                    throw ConsistencyError("sellmeier set '" + name +
                                           "': constant form takes 1 coefficient");
                break;
            case SellmeierForm::temperature_two_pole:
                if (nc != 6 || nt != 6)
                    throw ConsistencyError("sellmeier set '" + name +
                                           "': temperature_two_pole form takes 6 coefficients "
                                           "and 6 temperature terms");
                break;
        }
    }
};

// Constant-index set covering a wide window; used by toy configurations.
inline SellmeierSet constant_index_set(double n0, const std::string& name = "constant index") {
    SellmeierSet s;
    s.name = name;
    s.form = SellmeierForm::constant;
    s.coefficients = {n0};
    s.valid_wavelength_min_nm = 1.0;
    s.valid_wavelength_max_nm = 1e7;
    s.valid_temperature_min_C = -273.0;
    s.valid_temperature_max_C = 1e4;
    return s;
}

namespace detail {

inline void check_wavelength(double lambda_nm, const SellmeierSet& set, bool strict_interior) {
    const bool low = strict_interior ? lambda_nm <= set.valid_wavelength_min_nm
                                     : lambda_nm < set.valid_wavelength_min_nm;
    const bool high = strict_interior ? lambda_nm >= set.valid_wavelength_max_nm
                                      : lambda_nm > set.valid_wavelength_max_nm;
    if (low)
        throw RangeError("wavelength " + format_sig(lambda_nm) + " nm violates the lower valid "
                         "bound " + format_sig(set.valid_wavelength_min_nm) + " nm of set '" +
                         set.name + "'");
    if (high)
        throw RangeError("wavelength " + format_sig(lambda_nm) + " nm violates the upper valid "
                         "bound " + format_sig(set.valid_wavelength_max_nm) + " nm of set '" +
                         set.name + "'");
}

inline void check_temperature(double temp_C, const SellmeierSet& set) {
    if (temp_C < set.valid_temperature_min_C)
        throw RangeError("temperature " + format_sig(temp_C) + " C violates the lower valid "
                         "bound " + format_sig(set.valid_temperature_min_C) + " C of set '" +
                         set.name + "'");
    if (temp_C > set.valid_temperature_max_C)
        throw RangeError("temperature " + format_sig(temp_C) + " C violates the upper valid "
                         "bound " + format_sig(set.valid_temperature_max_C) + " C of set '" +
                         set.name + "'");
}

struct IndexAndSlope {
    double n;            // refractive index
    double dn_dlam_um;   // dn / d(lambda_um)
};

inline IndexAndSlope evaluate_two_pole(double lambda_um, double temp_C, const SellmeierSet& set) {
    const auto& c = set.coefficients;
    const auto& t = set.temperature_model;
    const double f = (temp_C - t[4]) * (temp_C + t[5]);
    const double l2 = lambda_um * lambda_um;
    const double pole1 = c[2] + t[2] * f;
    const double d1 = l2 - pole1 * pole1;
    const double d2 = l2 - c[4] * c[4];
    const double n2 = (c[0] + t[0] * f) + (c[1] + t[1] * f) / d1 + (c[3] + t[3] * f) / d2
                    - c[5] * l2;
    if (!(n2 > 1.0) || !std::isfinite(n2))
        throw NumericError("sellmeier set '" + set.name + "' produced a nonphysical index at " +
                           format_sig(lambda_um * 1e3) + " nm");
    const double n = std::sqrt(n2);
    const double dn2_dl2 = -(c[1] + t[1] * f) / (d1 * d1) - (c[3] + t[3] * f) / (d2 * d2) - c[5];
    return {n, dn2_dl2 * 2.0 * lambda_um / (2.0 * n)};
}

inline IndexAndSlope evaluate(double lambda_nm, double temp_C, const SellmeierSet& set) {
    switch (set.form) {
        case SellmeierForm::constant:
            return {set.coefficients[0], 0.0};
        case SellmeierForm::temperature_two_pole:
            return evaluate_two_pole(lambda_nm * 1e-3, temp_C, set);
    }
    throw ConsistencyError("unknown sellmeier form");
}

}  // namespace detail

// n_e(lambda, T); pure and deterministic.
inline double refractive_index(double lambda_nm, double temp_C, const SellmeierSet& set) {
    detail::check_wavelength(lambda_nm, set, /*strict_interior=*/false);
    detail::check_temperature(temp_C, set);
    return detail::evaluate(lambda_nm, temp_C, set).n;
}

// D = d(n(omega) omega / c)/domega = (n - lambda dn/dlambda)/c  [s/m].
// Analytic differentiation of the configured form; the derivative needs a
// neighbourhood, so the wavelength must be strictly inside the valid range.
inline double group_term(double lambda_nm, double temp_C, const SellmeierSet& set) {
    detail::check_wavelength(lambda_nm, set, /*strict_interior=*/true);
    detail::check_temperature(temp_C, set);
    const auto e = detail::evaluate(lambda_nm, temp_C, set);
    const double lambda_um = lambda_nm * 1e-3;
    return (e.n - lambda_um * e.dn_dlam_um) / speed_of_light;
}

inline SellmeierForm sellmeier_form_from_string(const std::string& s) {
    if (s == "constant") return SellmeierForm::constant;
    if (s == "temperature_two_pole") return SellmeierForm::temperature_two_pole;
    throw IoError("unknown sellmeier form '" + s + "'");
}

inline std::string to_string(SellmeierForm f) {
    return f == SellmeierForm::constant ? "constant" : "temperature_two_pole";
}

inline SellmeierSet sellmeier_from_json(const nlohmann::json& j) {
    SellmeierSet s;
    try {
        s.name = j.at("name").get<std::string>();
        s.form = sellmeier_form_from_string(j.at("form").get<std::string>());
        s.coefficients = j.at("coefficients").get<std::vector<double>>();
        if (j.contains("temperature_model"))
            s.temperature_model = j.at("temperature_model").get<std::vector<double>>();
        const auto wl = j.at("valid_wavelength_nm").get<std::vector<double>>();
        const auto tc = j.at("valid_temperature_C").get<std::vector<double>>();
        if (wl.size() != 2 || tc.size() != 2)
            throw IoError("sellmeier validity ranges must be [min, max] pairs");
        s.valid_wavelength_min_nm = wl[0];
        s.valid_wavelength_max_nm = wl[1];
        s.valid_temperature_min_C = tc[0];
        s.valid_temperature_max_C = tc[1];
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed sellmeier document: ") + e.what());
    }
    s.validate();
    return s;
}

inline SellmeierSet load_sellmeier_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open sellmeier file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse sellmeier file '" + path + "': " + e.what());
    }
    return sellmeier_from_json(j);
}

}  // namespace ppsource
