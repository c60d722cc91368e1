#include "sbt/arx.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sbt/errors.hpp"

namespace sbt {

ArxConfig ArxConfig::uniform(std::size_t na, std::size_t nb, std::size_t nk, std::size_t outputs,
                             std::size_t inputs) {
    ArxConfig c;
    c.outputs = outputs;
    c.inputs = inputs;
    c.na.assign(outputs, std::vector<std::size_t>(outputs, na));
    c.nb.assign(outputs, std::vector<std::size_t>(inputs, nb));
    c.nk.assign(outputs, std::vector<std::size_t>(inputs, nk));
    return c;
}

std::size_t ArxConfig::coefficient_count(std::size_t output) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < outputs; ++i) n += na[output][i];
    for (std::size_t i = 0; i < inputs; ++i) n += nb[output][i];
    return n;
}

std::size_t ArxConfig::max_lag(std::size_t output) const {
    std::size_t lag = 0;
    for (std::size_t i = 0; i < outputs; ++i) lag = std::max(lag, na[output][i]);
    for (std::size_t i = 0; i < inputs; ++i) lag = std::max(lag, nk[output][i] + nb[output][i] - 1);
    return lag;
}

void ArxConfig::validate() const {
    if (outputs < 1 || inputs < 1) throw ConfigError("ARX needs at least one input and one output");
    if (na.size() != outputs || nb.size() != outputs || nk.size() != outputs)
        throw ConfigError("ARX order matrices must have one row per output");
    for (std::size_t j = 0; j < outputs; ++j) {
        if (na[j].size() != outputs || nb[j].size() != inputs || nk[j].size() != inputs)
            throw ConfigError("ARX order matrix has the wrong number of columns");
        for (std::size_t i = 0; i < inputs; ++i) {
            if (nb[j][i] < 1) throw ConfigError("ARX input order nb must be at least 1");
            if (nk[j][i] < 1) throw ConfigError("ARX input delay nk must be at least 1");
        }
    }
}

namespace {

/// Regressor row for output `j` at time `k`; lags before 0 read as zero.
template <typename Lookup>
void fill_regressor(const ArxConfig& cfg, std::size_t j, std::ptrdiff_t k, Lookup&& y,
                    const Signal& u, double* row) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < cfg.outputs; ++i)
        for (std::size_t l = 1; l <= cfg.na[j][i]; ++l) row[c++] = y(i, k - static_cast<std::ptrdiff_t>(l));
    for (std::size_t i = 0; i < cfg.inputs; ++i)
        for (std::size_t l = 0; l < cfg.nb[j][i]; ++l) {
            const auto idx = k - static_cast<std::ptrdiff_t>(cfg.nk[j][i] + l);
            row[c++] = idx >= 0 ? u.channels[i][static_cast<std::size_t>(idx)] : 0.0;
        }
}

}  // namespace

ArxModel fit_arx(std::span<const IoRecord> data, const ArxConfig& config) {
    config.validate();
    for (const auto& rec : data) {
        if (rec.input.channel_count() != config.inputs || rec.output.channel_count() != config.outputs)
            throw ConfigError("record channel counts do not match the ARX structure");
        if (rec.input.length() != rec.output.length())
            throw ConfigError("record input and output lengths differ");
    }

    ArxModel model;
    model.config = config;
    for (std::size_t j = 0; j < config.outputs; ++j) {
        const std::size_t p = config.coefficient_count(j);
        const std::size_t lag = config.max_lag(j);
        std::size_t rows = 0;
        for (const auto& rec : data) rows += rec.output.length() > lag ? rec.output.length() - lag : 0;
        if (rows < p)
            throw ConfigError("ARX fit needs at least as many regression rows as coefficients");

        Eigen::MatrixXd phi(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
        Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
        std::vector<double> row(p);
        Eigen::Index r = 0;
        for (const auto& rec : data) {
            auto y = [&](std::size_t i, std::ptrdiff_t idx) {
                return rec.output.channels[i][static_cast<std::size_t>(idx)];
            };
            for (std::size_t k = lag; k < rec.output.length(); ++k, ++r) {
                fill_regressor(config, j, static_cast<std::ptrdiff_t>(k), y, rec.input, row.data());
                for (std::size_t c = 0; c < p; ++c) phi(r, static_cast<Eigen::Index>(c)) = row[c];
                target(r) = rec.output.channels[j][k];
            }
        }

        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(phi);
        const Eigen::VectorXd theta = cod.solve(target);
        if (cod.rank() < static_cast<Eigen::Index>(p)) model.rank_deficient = true;
        if (!theta.allFinite()) throw EvaluationError("ARX fit produced non-finite coefficients");

        const Eigen::VectorXd residual = target - phi * theta;
        const double scale = phi.norm() * target.norm();
        const double ortho = scale > 0.0 ? (phi.transpose() * residual).norm() / scale : 0.0;
        model.orthogonality = std::max(model.orthogonality, ortho);
        model.residual_norm.push_back(residual.norm());
        model.theta.emplace_back(theta.data(), theta.data() + theta.size());
        model.rows = std::max(model.rows, rows);
    }
    return model;
}

Signal simulate_arx(const ArxModel& model, const Signal& input) {
    const auto& cfg = model.config;
    if (input.channel_count() != cfg.inputs)
        throw ConfigError("input channel count does not match the ARX structure");
    const std::size_t n = input.length();
    Signal out(input.period, cfg.outputs, n);
    auto y = [&](std::size_t i, std::ptrdiff_t idx) {
        return idx >= 0 ? out.channels[i][static_cast<std::size_t>(idx)] : 0.0;
    };
    std::vector<double> row;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < cfg.outputs; ++j) {
            const auto& theta = model.theta[j];
            row.assign(theta.size(), 0.0);
            fill_regressor(cfg, j, static_cast<std::ptrdiff_t>(k), y, input, row.data());
            double v = 0.0;
            for (std::size_t c = 0; c < theta.size(); ++c) v += theta[c] * row[c];
            out.channels[j][k] = v;
        }
    }
    return out;
}

}  // namespace sbt
