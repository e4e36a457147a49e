#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "ppsource/errors.hpp"
#include "ppsource/rng.hpp"
#include "ppsource/units.hpp"

namespace ppsource {

// Poissonian gated-detection model. Events on the heralded detector are
// uniform in time; a correlated photon, when present, arrives exactly at the
// middle of the gate and is detected with probability chi_D.
struct GateModel {
    double gate_duration = 0.0;           // s
    double background_event_rate = 0.0;   // events/s on the heralded detector
    double p_heralding_background = 0.0;  // probability a herald is background
    double chi_d_true = 0.0;              // underlying raw detection efficiency

    double p0_full() const { return std::exp(-background_event_rate * gate_duration); }
    double p0_half() const { return std::exp(-background_event_rate * gate_duration / 2.0); }

    void validate() const {
        if (!(gate_duration > 0.0)) throw ConsistencyError("gate duration must be positive");
        if (background_event_rate < 0.0)
            throw ConsistencyError("background event rate must be non-negative");
        if (!(p_heralding_background >= 0.0 && p_heralding_background <= 1.0))
            throw ConsistencyError("heralding background probability outside [0, 1]");
        if (!(chi_d_true >= 0.0 && chi_d_true <= 1.0))
            throw ConsistencyError("chi_D outside [0, 1]");
    }
};

// The five raw counter totals of one calibration run.
struct CountRecord {
    std::uint64_t m_coinc = 0;
    std::uint64_t m_heralding = 0;
    std::uint64_t m_uncorr = 0;
    std::uint64_t m_heralding_delayed = 0;
    std::uint64_t m_backgnd = 0;

    void validate() const {
        if (m_coinc > m_heralding)
            throw ConsistencyError("M_coinc exceeds M_heralding");
        if (m_uncorr >= m_heralding_delayed)
            throw ConsistencyError("M_uncorr must be below M_heralding_delayed");
        if (m_backgnd > m_heralding)
            throw ConsistencyError("M_backgnd exceeds M_heralding");
        if (m_heralding == 0)
            throw ConsistencyError("M_heralding must be positive");
    }
};

struct EfficiencyEstimate {
    double chi_d = 0.0;
    double sigma_ml = 0.0;           // absolute standard uncertainty
    double coverage_factor_k = 2.0;  // reported intervals use k = 2
    bool background_ratio_warning = false;  // M_backgnd / M_heralding above 0.05
};

struct ForwardProbabilities {
    double p_coinc = 0.0;
    double p_uncorr = 0.0;  // accidental-coincidence probability, aligned gate
};

// Closed-form per-gate probabilities. P_uncorr is the three-term accidental
// probability of the aligned configuration; the delayed configuration equals
// the same expression at chi_D = 0, which collapses to 1 - p0_T.
inline ForwardProbabilities forward_probabilities(const GateModel& m) {
    m.validate();
    const double p0T = m.p0_full();
    const double p0H = m.p0_half();
    const double p_bg = m.p_heralding_background;
    const double p_pdc = 1.0 - p_bg;
    ForwardProbabilities f;
    f.p_uncorr = (1.0 - p0T) * p_bg + (1.0 - p0H) * p_pdc +
                 p0H * (1.0 - m.chi_d_true) * (1.0 - p0H) * p_pdc;
    f.p_coinc = p_pdc * p0H * m.chi_d_true + f.p_uncorr;
    return f;
}

// Maximum-likelihood estimate of the raw detection efficiency,
//   chi_D = [1 - (M_hd / (M_hd - M_u)) (1 - M_c / M_h)] / (1 - M_bg / M_h),
// with the uncertainty from first-order propagation: (M_c | M_h) and
// (M_u | M_hd) binomial at their ML points, the background ratio Poissonian
// in both counts, all treated as independent.
inline EfficiencyEstimate estimate_chi_d(const CountRecord& rec) {
    if (rec.m_heralding_delayed > 0 && rec.m_uncorr >= rec.m_heralding_delayed)
        throw DomainError("all-accidental record: M_uncorr reaches M_heralding_delayed");
    if (rec.m_heralding > 0 && rec.m_backgnd >= rec.m_heralding)
        throw DomainError("degenerate heralding: background counts reach M_heralding");
    rec.validate();
    const double r_c = static_cast<double>(rec.m_coinc) / static_cast<double>(rec.m_heralding);
    const double p_u =
        static_cast<double>(rec.m_uncorr) / static_cast<double>(rec.m_heralding_delayed);
    const double g = 1.0 / (1.0 - p_u);
    const double b = static_cast<double>(rec.m_backgnd) / static_cast<double>(rec.m_heralding);
    const double numer = 1.0 - g * (1.0 - r_c);
    const double denom = 1.0 - b;
    EfficiencyEstimate est;
    est.chi_d = numer / denom;
    est.background_ratio_warning = b > 0.05;

    const double var_rc =
        r_c * (1.0 - r_c) / static_cast<double>(rec.m_heralding);
    const double var_g =
        p_u / ((1.0 - p_u) * (1.0 - p_u) * (1.0 - p_u)
               * static_cast<double>(rec.m_heralding_delayed));
    const double var_b =
        rec.m_backgnd == 0
            ? 0.0
            : b * b * (1.0 / static_cast<double>(rec.m_backgnd) +
                       1.0 / static_cast<double>(rec.m_heralding));
    const double d_rc = g / denom;
    const double d_g = -(1.0 - r_c) / denom;
    const double d_b = numer / (denom * denom);
    est.sigma_ml = std::sqrt(d_rc * d_rc * var_rc + d_g * d_g * var_g + d_b * d_b * var_b);
    return est;
}

// Simulates one calibration run: an aligned acquisition (correlated photon at
// T/2), a delayed acquisition (gate misses the correlated photon) and an
// independent background-herald count, each on its own derived stream, all
// reproducible from the seed.
inline CountRecord simulate_run(const GateModel& m, std::uint64_t n_heralds, std::uint64_t seed) {
    m.validate();
    if (n_heralds == 0) throw ConsistencyError("n_heralds must be positive");
    const double T = m.gate_duration;
    const double half = T / 2.0;
    const double rate = m.background_event_rate;

    SplitMix64 aligned(derive_stream_seed(seed, 1));
    SplitMix64 delayed(derive_stream_seed(seed, 2));
    SplitMix64 background(derive_stream_seed(seed, 3));

    CountRecord rec;
    rec.m_heralding = n_heralds;
    rec.m_heralding_delayed = n_heralds;
    for (std::uint64_t k = 0; k < n_heralds; ++k) {
        const bool herald_is_background = aligned.bernoulli(m.p_heralding_background);
        const double t_bg = aligned.exponential(rate);
        bool fired;
        if (herald_is_background) {
            fired = t_bg <= T;
        } else if (t_bg <= half) {
            fired = true;
        } else if (aligned.bernoulli(m.chi_d_true)) {
            fired = true;  // correlated photon detected at T/2
        } else {
            fired = t_bg <= T;
        }
        if (fired) ++rec.m_coinc;
    }
    for (std::uint64_t k = 0; k < n_heralds; ++k) {
        if (delayed.exponential(rate) <= T) ++rec.m_uncorr;
    }
    for (std::uint64_t k = 0; k < n_heralds; ++k) {
        if (background.bernoulli(m.p_heralding_background)) ++rec.m_backgnd;
    }
    return rec;
}

namespace detail {

template <class Fn>
void parallel_for_runs(std::uint64_t n_runs, Fn&& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::uint64_t>(hw, n_runs));
    if (n_threads <= 1) {
        for (std::uint64_t i = 0; i < n_runs; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([=, &body] {
            // static partition: results land in fixed slots, so scheduling
            // cannot affect the outcome
            for (std::uint64_t i = t; i < n_runs; i += n_threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Independent simulated runs with per-run derived seeds; estimates land in
// run order regardless of thread scheduling.
inline std::vector<EfficiencyEstimate> run_ensemble(const GateModel& m, std::uint64_t n_heralds,
                                                    std::uint64_t n_runs, std::uint64_t seed) {
    m.validate();
    if (n_runs == 0) throw ConsistencyError("n_runs must be positive");
    std::vector<EfficiencyEstimate> out(n_runs);
    detail::parallel_for_runs(n_runs, [&](std::uint64_t i) {
        const CountRecord rec = simulate_run(m, n_heralds, derive_stream_seed(seed, 0x10000 + i));
        out[i] = estimate_chi_d(rec);
    });
    return out;
}

// Fraction of simulated runs whose k=2 interval covers the true chi_D.
inline double coverage_study(const GateModel& m, std::uint64_t n_heralds, std::uint64_t n_runs,
                             std::uint64_t seed) {
    if (n_runs < 100) throw DomainError("coverage_study needs at least 100 runs");
    const auto estimates = run_ensemble(m, n_heralds, n_runs, seed);
    std::uint64_t covered = 0;
    for (const auto& e : estimates) {
        if (std::abs(e.chi_d - m.chi_d_true) <= 2.0 * e.sigma_ml) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(n_runs);
}

}  // namespace ppsource
