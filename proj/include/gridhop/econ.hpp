#pragma once

// Discounted cash-flow value of reinforcement deferral and of recurring
// operational benefits.

#include <cmath>
#include <string>

#include "gridhop/errors.hpp"

namespace gridhop::econ {

inline constexpr double kHoursPerYear = 8760.0;

struct EconParams {
    double discount_rate = 0.0;
    int horizon_years = 0;
    double annual_benefit = 0.0;
    int deferral_years = 0;
    std::string currency = "$";

    bool operator==(const EconParams&) const = default;
};

namespace detail {
inline void check(double rate, int years) {
    if (!(rate > -1.0)) throw InvalidRate("discount rate must exceed -1");
    if (years < 0) throw InvalidRate("year count must be non-negative");
}
} // namespace detail

/// Present-value saving, in percent, of deferring a cost by `years`.
inline double deferral_cost_reduction(int years, double rate) {
    detail::check(rate, years);
    return 100.0 - 100.0 / std::pow(1.0 + rate, years);
}

/// Present value of `annual_benefit` received at the end of each of `years`.
inline double lifetime_operational_benefit(double annual_benefit, int years, double rate) {
    detail::check(rate, years);
    double factor = 0.0;
    for (int i = 1; i <= years; ++i) factor += 1.0 / std::pow(1.0 + rate, i);
    return annual_benefit * factor;
}

/// Closed-form annuity; agrees with the summation above.
inline double annuity_present_value(double annual_benefit, int years, double rate) {
    detail::check(rate, years);
    if (rate == 0.0) return annual_benefit * years;
    return annual_benefit * (1.0 - std::pow(1.0 + rate, -years)) / rate;
}

inline double annual_energy_mwh(double average_mw) { return average_mw * kHoursPerYear; }

inline double loss_reduction_annual_benefit(double average_loss_reduction_mw, double price_per_mwh) {
    if (average_loss_reduction_mw < 0.0 || price_per_mwh < 0.0) throw Error("loss reduction and price must be non-negative");
    return annual_energy_mwh(average_loss_reduction_mw) * price_per_mwh;
}

} // namespace gridhop::econ
