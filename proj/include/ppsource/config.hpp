#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "ppsource/counting.hpp"
#include "ppsource/dispersion.hpp"
#include "ppsource/errors.hpp"
#include "ppsource/heralding.hpp"
#include "ppsource/phasematching.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

// One JSON document per experiment; units are embedded in the field names
// (_nm, _um, _mm, _deg, _C, _ns, _hz) so files are self-describing.
struct ExperimentConfig {
    CrystalSpec crystal;
    PumpSpec pump;
    CollectionMode heralding_mode;
    CollectionMode heralded_mode;
    EfficiencyBudget budget;
    std::optional<GateModel> gate;

    BeamGeometry geometry() const {
        BeamGeometry g;
        g.pump = pump;
        g.heralding_mode = heralding_mode;
        g.heralded_mode = heralded_mode;
        return g;
    }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw IoError(std::string("config ") + where + ": missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

inline std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number())
        throw IoError(std::string("config field '") + key + "' must be numeric");
    return j.at(key).get<double>();
}

inline CollectionMode parse_mode(const nlohmann::json& j, const char* where) {
    CollectionMode m;
    m.mfd = um_to_m(require_number(j, "mfd_um", where));
    m.waist_at_crystal = um_to_m(require_number(j, "waist_at_crystal_um", where));
    m.external_angle = deg_to_rad(require_number(j, "external_angle_deg", where));
    if (auto v = optional_number(j, "central_wavelength_nm")) m.central_wavelength = nm_to_m(*v);
    if (auto v = optional_number(j, "bandwidth_fwhm_nm")) m.bandwidth_fwhm_nm = *v;
    m.validate();
    return m;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    if (!j.contains("crystal") || !j.contains("pump") || !j.contains("heralding_mode") ||
        !j.contains("heralded_mode"))
        throw IoError("config: crystal, pump, heralding_mode and heralded_mode are required");

    const auto& jc = j.at("crystal");
    cfg.crystal.length = mm_to_m(detail::require_number(jc, "length_mm", "crystal"));
    cfg.crystal.poling_period = um_to_m(detail::require_number(jc, "poling_period_um", "crystal"));
    cfg.crystal.temperature = detail::require_number(jc, "temperature_C", "crystal");
    if (auto v = detail::optional_number(jc, "poling_length_mm"))
        cfg.crystal.poling_length = mm_to_m(*v);
    if (jc.contains("sellmeier_file")) {
        const std::filesystem::path p = jc.at("sellmeier_file").get<std::string>();
        const auto resolved = p.is_absolute() ? p : base_dir / p;
        cfg.crystal.sellmeier = load_sellmeier_file(resolved.string());
    } else if (jc.contains("sellmeier")) {
        cfg.crystal.sellmeier = sellmeier_from_json(jc.at("sellmeier"));
    } else {
        throw IoError("config crystal: provide sellmeier_file or an inline sellmeier object");
    }

    const auto& jp = j.at("pump");
    cfg.pump.wavelength = nm_to_m(detail::require_number(jp, "wavelength_nm", "pump"));
    cfg.pump.waist = um_to_m(detail::require_number(jp, "waist_um", "pump"));

    cfg.heralding_mode = detail::parse_mode(j.at("heralding_mode"), "heralding_mode");
    cfg.heralded_mode = detail::parse_mode(j.at("heralded_mode"), "heralded_mode");

    if (j.contains("budget")) {
        const auto& jb = j.at("budget");
        cfg.budget.tau_opt = detail::require_number(jb, "tau_opt", "budget");
        cfg.budget.tau_smf_lens = detail::require_number(jb, "tau_smf_lens", "budget");
        if (auto v = detail::optional_number(jb, "eta_det")) cfg.budget.eta_det = *v;
        if (auto v = detail::optional_number(jb, "chi_p")) cfg.budget.chi_p = *v;
        if (auto v = detail::optional_number(jb, "chi_d")) cfg.budget.chi_d = *v;
    }

    if (j.contains("gate")) {
        const auto& jg = j.at("gate");
        GateModel g;
        g.gate_duration = detail::require_number(jg, "duration_ns", "gate") * 1e-9;
        g.background_event_rate = detail::require_number(jg, "background_rate_hz", "gate");
        g.p_heralding_background = detail::require_number(jg, "p_heralding_background", "gate");
        g.chi_d_true = detail::require_number(jg, "chi_d_true", "gate");
        g.validate();
        cfg.gate = g;
    }

    cfg.crystal.validate();
    cfg.pump.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse config file '" + path + "': " + e.what());
    }
    return config_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace ppsource
