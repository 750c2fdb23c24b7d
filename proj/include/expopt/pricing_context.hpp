#pragma once

#include <string_view>

namespace expopt {

enum class OptionKind { Call, Put };

constexpr std::string_view to_string(OptionKind k) { return k == OptionKind::Call ? "C" : "P"; }

/// Market state shared by every pricer.
///
/// `discount_rate` is the trader's hedge rate R, which may sit a few points
/// above the risk-free rate; `carry_rate` is the growth rate c of the mean
/// price ratio. Time is in years.
struct PricingContext {
    double p0 = 100.0;
    double discount_rate = 0.0;
    double carry_rate = 0.0;
    double dt = 1.0;
    double tic = 1.0 / 64.0;

    void validate() const;
    /// Mean terminal price p0 * e^{c dt}.
    double forward() const;
    double discount() const;
};

}  // namespace expopt
