#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ppsource/counting.hpp"
#include "ppsource/errors.hpp"
#include "ppsource/heralding.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

// Sweep grid CSV, one row per (w_o1, w_o2) point. Points that failed keep
// their waists and carry "nan" in the computed columns.
inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    os << "w_o1_um,w_o2_um,delta1_nm,delta2_nm,chi_p\n";
    for (const auto& pt : sweep.points) {
        os << format_sig(m_to_um(pt.w_o1)) << ',' << format_sig(m_to_um(pt.w_o2)) << ',';
        if (pt.ok)
            os << format_sig(pt.delta1_nm) << ',' << format_sig(pt.delta2_nm) << ','
               << format_sig(pt.chi_p) << '\n';
        else
            os << "nan,nan,nan\n";
    }
}

inline void write_count_records_csv(std::ostream& os, const std::vector<CountRecord>& records) {
    os << "M_coinc,M_heralding,M_uncorr,M_heralding_delayed,M_backgnd\n";
    for (const auto& r : records) {
        os << r.m_coinc << ',' << r.m_heralding << ',' << r.m_uncorr << ','
           << r.m_heralding_delayed << ',' << r.m_backgnd << '\n';
    }
}

inline std::vector<CountRecord> read_count_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("count-record CSV is empty");
    // tolerate trailing carriage returns from foreign tools
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (strip(line) != "M_coinc,M_heralding,M_uncorr,M_heralding_delayed,M_backgnd")
        throw IoError("count-record CSV header mismatch: got '" + strip(line) + "'");
    std::vector<CountRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = strip(line);
        if (s.empty()) continue;
        std::istringstream row(s);
        CountRecord r;
        char c1, c2, c3, c4;
        if (!(row >> r.m_coinc >> c1 >> r.m_heralding >> c2 >> r.m_uncorr >> c3 >>
              r.m_heralding_delayed >> c4 >> r.m_backgnd) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            throw IoError("count-record CSV: malformed row at line " + std::to_string(lineno));
        r.validate();
        out.push_back(r);
    }
    if (out.empty()) throw IoError("count-record CSV has no data rows");
    return out;
}

inline nlohmann::json estimate_to_json(const EfficiencyEstimate& est, const CountRecord& rec) {
    nlohmann::json j;
    j["chi_d"] = est.chi_d;
    j["sigma_ml"] = est.sigma_ml;
    j["k"] = est.coverage_factor_k;
    j["counts"] = {{"M_coinc", rec.m_coinc},
                   {"M_heralding", rec.m_heralding},
                   {"M_uncorr", rec.m_uncorr},
                   {"M_heralding_delayed", rec.m_heralding_delayed},
                   {"M_backgnd", rec.m_backgnd}};
    if (est.background_ratio_warning)
        j["warning"] = "background heralding ratio exceeds 0.05";
    return j;
}

}  // namespace ppsource
