#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcbm/error.hpp"
#include "qcbm/timeseries.hpp"

namespace qcbm {

// Stand-in for a government bond yield download: correlated, fat-tailed daily
// changes on a weekday calendar, quoted to three decimals in percent.
struct SyntheticRatesConfig {
    Date start{std::chrono::year{2000}, std::chrono::month{1}, std::chrono::day{4}};
    Date end{std::chrono::year{2025}, std::chrono::month{2}, std::chrono::day{28}};
    std::uint64_t seed = 2000;
    std::vector<std::string> names{"1Y", "5Y", "10Y", "20Y"};
    std::vector<double> initial{0.15, 0.85, 1.75, 2.20};       // percent
    std::vector<double> daily_vol_bp{1.2, 2.6, 2.9, 3.1};       // per-day std of changes
    // Correlation of daily changes; neighbouring maturities move together.
    std::vector<std::vector<double>> correlation{
        {1.00, 0.55, 0.40, 0.30},
        {0.55, 1.00, 0.85, 0.70},
        {0.40, 0.85, 1.00, 0.88},
        {0.30, 0.70, 0.88, 1.00},
    };
    // Volatility regimes: from each start date on, per-series multipliers of
    // daily_vol_bp. The low-volatility stretch mimics a pinned yield curve.
    struct Regime {
        Date start;
        std::vector<double> multiplier;
    };
    std::vector<Regime> regimes{
        {Date{std::chrono::year{2013}, std::chrono::month{4}, std::chrono::day{1}}, {0.6, 0.8, 0.9, 1.0}},
        {Date{std::chrono::year{2016}, std::chrono::month{9}, std::chrono::day{21}}, {0.3, 0.35, 0.4, 0.6}},
        {Date{std::chrono::year{2022}, std::chrono::month{12}, std::chrono::day{20}}, {1.0, 1.3, 1.4, 1.3}},
    };
    double student_dof = 4.0;
    double mean_reversion = 0.0005;  // pull toward the initial level per day
    double holiday_rate = 0.03;      // weekdays with no quote at all
    double missing_rate = 0.004;     // single cells published as "-"
};

struct SyntheticRates {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;       // values[series][t], NaN = missing
};

inline SyntheticRates generate_synthetic_rates(const SyntheticRatesConfig& cfg) {
    const std::size_t k = cfg.names.size();
    if (k == 0 || cfg.initial.size() != k || cfg.daily_vol_bp.size() != k || cfg.correlation.size() != k) {
        throw ValidationError("synthetic rates: per-series settings disagree in length");
    }
    if (!(cfg.student_dof > 2.0)) throw ValidationError("synthetic rates: student_dof must be > 2");
    Eigen::MatrixXd corr(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        if (cfg.correlation[i].size() != k) throw ValidationError("synthetic rates: correlation must be square");
        for (std::size_t j = 0; j < k; ++j) corr(i, j) = cfg.correlation[i][j];
    }
    for (const auto& r : cfg.regimes) {
        if (r.multiplier.size() != k) throw ValidationError("synthetic rates: regime multiplier length mismatch");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success) throw ValidationError("synthetic rates: correlation is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    std::mt19937_64 rng(cfg.seed);
    std::student_t_distribution<double> student(cfg.student_dof);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double t_scale = std::sqrt((cfg.student_dof - 2.0) / cfg.student_dof);  // unit variance

    SyntheticRates out;
    out.names = cfg.names;
    out.values.assign(k, {});
    std::vector<double> level = cfg.initial;
    const auto first = std::chrono::sys_days{cfg.start}, last = std::chrono::sys_days{cfg.end};
    if (last < first) throw ValidationError("synthetic rates: end before start");
    for (auto day = first; day <= last; day += std::chrono::days{1}) {
        const std::chrono::weekday wd{day};
        if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) continue;
        if (unit(rng) < cfg.holiday_rate) continue;
        Eigen::VectorXd z(k);
        for (std::size_t i = 0; i < k; ++i) z(i) = t_scale * student(rng);
        const Eigen::VectorXd shock = chol * z;
        const Date date{day};
        const std::vector<double>* mult = nullptr;
        for (const auto& r : cfg.regimes) {
            if (!(date < r.start)) mult = &r.multiplier;
        }
        out.dates.push_back(date);
        for (std::size_t i = 0; i < k; ++i) {
            const double vol = cfg.daily_vol_bp[i] * (mult ? (*mult)[i] : 1.0);
            level[i] += vol * 0.01 * shock(i) + cfg.mean_reversion * (cfg.initial[i] - level[i]);
            const double quoted = std::round(level[i] * 1000.0) / 1000.0;
            out.values[i].push_back(unit(rng) < cfg.missing_rate ? std::nan("") : quoted);
        }
    }
    return out;
}

// Writes a two-line preamble, a "Date,<names>" header and YYYY/M/D rows.
inline void write_rates_csv(std::ostream& os, const SyntheticRates& r) {
    os << "Interest Rate (synthetic government bond yields)\n";
    os << "(Unit : %)\n";
    os << "Date";
    for (const auto& n : r.names) os << ',' << n;
    os << '\n';
    char buf[32];
    for (std::size_t t = 0; t < r.dates.size(); ++t) {
        const auto& d = r.dates[t];
        os << static_cast<int>(d.year()) << '/' << static_cast<unsigned>(d.month()) << '/' << static_cast<unsigned>(d.day());
        for (const auto& v : r.values) {
            if (std::isnan(v[t])) {
                os << ",-";
            } else {
                std::snprintf(buf, sizeof(buf), "%.3f", v[t]);
                os << ',' << buf;
            }
        }
        os << '\n';
    }
}

}  // namespace qcbm
