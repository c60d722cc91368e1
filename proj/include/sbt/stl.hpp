#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sbt/signal.hpp"

namespace sbt::stl {

/// Signal temporal logic formula over the output channels of a trace.
///
/// Quantitative semantics at time t:
///   y_i <= c         ->  c - y_i(t)
///   y_i >= c         ->  y_i(t) - c
///   not f            ->  -rho(f)
///   f and g / or     ->  min / max
///   always[a,b] f    ->  min over t' in [t+a, t+b] of rho(f, t')
///   eventually[a,b]  ->  max over the same window
/// Time bounds are in seconds; windows are evaluated on the sample grid.
class Formula {
public:
    enum class Kind { le, ge, negation, conjunction, disjunction, always, eventually };

    static Formula le(std::size_t channel, double constant);
    static Formula ge(std::size_t channel, double constant);
    static Formula negation(Formula f);
    static Formula conjunction(Formula f, Formula g);
    static Formula disjunction(Formula f, Formula g);
    static Formula always(double a, double b, Formula f);
    static Formula eventually(double a, double b, Formula f);

    Kind kind() const { return kind_; }
    std::size_t channel() const { return channel_; }
    double constant() const { return constant_; }
    double lower() const { return a_; }
    double upper() const { return b_; }
    const std::vector<Formula>& children() const { return children_; }

    /// Latest time (relative to 0) the root value depends on.
    double horizon() const;
    std::size_t max_channel() const;

    std::string to_string() const;

private:
    Kind kind_ = Kind::le;
    std::size_t channel_ = 0;
    double constant_ = 0.0;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<Formula> children_;
};

/// Robustness of `formula` at time 0. Throws HorizonError when the trace
/// is shorter than the formula's horizon or lacks a referenced channel.
double robustness(const Formula& formula, const Signal& trace);

/// Parses e.g. "always[0,30]((y0 <= 4) and (y0 >= -4))".
/// Channels are written y<index>; a bare "y" means y0.
Formula parse(std::string_view text);

}  // namespace sbt::stl
