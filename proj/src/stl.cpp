#include "sbt/stl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "sbt/errors.hpp"
#include "sbt/number_format.hpp"

namespace sbt::stl {

Formula Formula::le(std::size_t channel, double constant) {
    Formula f;
    f.kind_ = Kind::le;
    f.channel_ = channel;
    f.constant_ = constant;
    return f;
}

Formula Formula::ge(std::size_t channel, double constant) {
    Formula f = le(channel, constant);
    f.kind_ = Kind::ge;
    return f;
}

Formula Formula::negation(Formula g) {
    Formula f;
    f.kind_ = Kind::negation;
    f.children_.push_back(std::move(g));
    return f;
}

Formula Formula::conjunction(Formula g, Formula h) {
    Formula f;
    f.kind_ = Kind::conjunction;
    f.children_.push_back(std::move(g));
    f.children_.push_back(std::move(h));
    return f;
}

Formula Formula::disjunction(Formula g, Formula h) {
    Formula f = conjunction(std::move(g), std::move(h));
    f.kind_ = Kind::disjunction;
    return f;
}

Formula Formula::always(double a, double b, Formula g) {
    if (!(a >= 0.0 && a <= b)) throw ConfigError("temporal interval needs 0 <= a <= b");
    Formula f;
    f.kind_ = Kind::always;
    f.a_ = a;
    f.b_ = b;
    f.children_.push_back(std::move(g));
    return f;
}

Formula Formula::eventually(double a, double b, Formula g) {
    Formula f = always(a, b, std::move(g));
    f.kind_ = Kind::eventually;
    return f;
}

double Formula::horizon() const {
    double child = 0.0;
    for (const auto& c : children_) child = std::max(child, c.horizon());
    if (kind_ == Kind::always || kind_ == Kind::eventually) return b_ + child;
    return child;
}

std::size_t Formula::max_channel() const {
    std::size_t m = (kind_ == Kind::le || kind_ == Kind::ge) ? channel_ : 0;
    for (const auto& c : children_) m = std::max(m, c.max_channel());
    return m;
}

std::string Formula::to_string() const {
    switch (kind_) {
    case Kind::le:
        return "(y" + std::to_string(channel_) + " <= " + format_double(constant_) + ")";
    case Kind::ge:
        return "(y" + std::to_string(channel_) + " >= " + format_double(constant_) + ")";
    case Kind::negation:
        return "not " + children_[0].to_string();
    case Kind::conjunction:
        return "(" + children_[0].to_string() + " and " + children_[1].to_string() + ")";
    case Kind::disjunction:
        return "(" + children_[0].to_string() + " or " + children_[1].to_string() + ")";
    case Kind::always:
    case Kind::eventually:
        return std::string(kind_ == Kind::always ? "always" : "eventually") + "[" +
               format_double(a_) + "," + format_double(b_) + "](" + children_[0].to_string() + ")";
    }
    return {};
}

namespace {

std::vector<double> evaluate(const Formula& f, const Signal& trace) {
    const std::size_t n = trace.length();
    std::vector<double> out(n);
    switch (f.kind()) {
    case Formula::Kind::le:
    case Formula::Kind::ge: {
        const auto& y = trace.channels[f.channel()];
        for (std::size_t k = 0; k < n; ++k)
            out[k] = f.kind() == Formula::Kind::le ? f.constant() - y[k] : y[k] - f.constant();
        return out;
    }
    case Formula::Kind::negation: {
        out = evaluate(f.children()[0], trace);
        for (double& v : out) v = -v;
        return out;
    }
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction: {
        const auto lhs = evaluate(f.children()[0], trace);
        const auto rhs = evaluate(f.children()[1], trace);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = f.kind() == Formula::Kind::conjunction ? std::min(lhs[k], rhs[k])
                                                            : std::max(lhs[k], rhs[k]);
        return out;
    }
    case Formula::Kind::always:
    case Formula::Kind::eventually: {
        const auto inner = evaluate(f.children()[0], trace);
        const bool is_min = f.kind() == Formula::Kind::always;
        const auto lo = static_cast<std::size_t>(std::ceil(f.lower() / trace.period - 1e-9));
        const auto hi = static_cast<std::size_t>(std::floor(f.upper() / trace.period + 1e-9));
        constexpr double inf = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            double acc = is_min ? inf : -inf;
            for (std::size_t j = k + lo; j <= std::min(k + hi, n - 1); ++j)
                acc = is_min ? std::min(acc, inner[j]) : std::max(acc, inner[j]);
            out[k] = acc;
        }
        return out;
    }
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Formula parse_all() {
        Formula f = parse_or();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("requirement parse error at offset " + std::to_string(pos_) + ": " + why +
                          " in '" + std::string(s_) + "'");
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool keyword(std::string_view word) {
        skip();
        if (s_.substr(pos_, word.size()) != word) return false;
        const std::size_t end = pos_ + word.size();
        if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
            return false;
        pos_ = end;
        return true;
    }

    bool symbol(std::string_view sym) {
        skip();
        if (s_.substr(pos_, sym.size()) != sym) return false;
        pos_ += sym.size();
        return true;
    }

    void expect(std::string_view sym) {
        if (!symbol(sym)) fail("expected '" + std::string(sym) + "'");
    }

    double number() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                    std::string_view("+-.eE").find(s_[pos_]) != std::string_view::npos))
            ++pos_;
        if (start == pos_) fail("expected a number");
        return parse_double(s_.substr(start, pos_ - start));
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (keyword("or")) f = Formula::disjunction(std::move(f), parse_and());
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (keyword("and")) f = Formula::conjunction(std::move(f), parse_unary());
        return f;
    }

    Formula parse_unary() {
        if (keyword("not")) return Formula::negation(parse_unary());
        const bool is_always = keyword("always");
        if (is_always || keyword("eventually")) {
            expect("[");
            const double a = number();
            expect(",");
            const double b = number();
            expect("]");
            Formula body = parse_unary();
            return is_always ? Formula::always(a, b, std::move(body))
                             : Formula::eventually(a, b, std::move(body));
        }
        if (symbol("(")) {
            Formula f = parse_or();
            expect(")");
            return f;
        }
        return parse_atom();
    }

    Formula parse_atom() {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != 'y') fail("expected a signal name y<index>");
        ++pos_;
        std::size_t channel = 0;
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ > start) channel = static_cast<std::size_t>(parse_integer(s_.substr(start, pos_ - start)));
        if (symbol("<=")) return Formula::le(channel, number());
        if (symbol(">=")) return Formula::ge(channel, number());
        fail("expected '<=' or '>='");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

double robustness(const Formula& formula, const Signal& trace) {
    if (trace.length() == 0) throw HorizonError("robustness of an empty trace");
    if (formula.max_channel() >= trace.channel_count())
        throw HorizonError("requirement references a channel the trace does not have");
    if (formula.horizon() > trace.duration() + 1e-9 * std::max(1.0, trace.duration()))
        throw HorizonError("trace of duration " + format_double(trace.duration()) +
                           " s is shorter than the requirement horizon " +
                           format_double(formula.horizon()) + " s");
    return evaluate(formula, trace).front();
}

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace sbt::stl
