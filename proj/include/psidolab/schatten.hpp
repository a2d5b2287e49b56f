#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "psidolab/quantize.hpp"
#include "psidolab/symbol_class.hpp"

namespace psidolab {

// Singular values of the measure-weighted matrix h^n K, descending.
inline std::vector<double> singular_values(const OperatorKernel& k) {
    const Eigen::MatrixXcd m = k.action_matrix();
    if (!m.allFinite()) throw std::runtime_error("singular_values: kernel has non-finite entries");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& s = svd.singularValues();
    std::vector<double> out(s.data(), s.data() + s.size());
    return out;
}

inline double schatten_norm_from(const std::vector<double>& sv, double p) {
    if (p < 1.0) throw std::domain_error("schatten_norm: p must satisfy p >= 1");
    if (std::isinf(p)) return sv.empty() ? 0.0 : sv.front();
    std::vector<double> terms(sv.size());
    for (std::size_t i = 0; i < sv.size(); ++i) terms[i] = std::pow(sv[i], p);
    return std::pow(detail::pairwise_sum(terms.data(), terms.size()), 1.0 / p);
}

inline double schatten_norm(const OperatorKernel& k, double p) {
    return schatten_norm_from(singular_values(k), p);
}

// Descending singular values plus the requested Schatten norms of one
// operator, with enough metadata to reproduce the run.
struct SchattenReport {
    std::vector<double> singular_values;
    std::map<double, double> norms;
    GridSpec grid;
    std::string symbol_id;
    double tau = 0.0;
};

inline SchattenReport make_schatten_report(const OperatorKernel& k,
                                           const std::vector<double>& ps,
                                           const std::string& symbol_id, double tau) {
    SchattenReport r;
    r.singular_values = singular_values(k);
    for (double p : ps) r.norms[p] = schatten_norm_from(r.singular_values, p);
    r.grid = k.grid;
    r.symbol_id = symbol_id;
    r.tau = tau;
    return r;
}

enum class BoundHypothesis { Seminorm, Sobolev, Smoothed };

struct BoundParams {
    SeminormSpec spec;              // Seminorm
    double sobolev_s = 0.0;         // Sobolev
    std::vector<double> t, s;       // Smoothed: per-block Bessel exponents
};

// One row of the empirical bound table: lhs is the Schatten norm of the
// quantized operator, rhs the hypothesis quantity, ratio the empirical
// constant. The constants are reported, never asserted against a target;
// acceptance judges their stability.
struct BoundRecord {
    std::string symbol_id;
    double tau = 0.0;
    double p = 2.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    GridSpec grid;
    bool flagged = false;  // rhs = 0 with lhs > 0: signals a bug or aliasing
};

inline BoundRecord bound_report(const SampledFunction& a, double tau, double p,
                                BoundHypothesis hypothesis, const BoundParams& params,
                                const std::string& symbol_id = "") {
    BoundRecord rec;
    rec.symbol_id = symbol_id;
    rec.tau = tau;
    rec.p = p;
    rec.grid = a.grid;
    const OperatorKernel k = kernel_from_symbol(a, QuantizationParams(tau, a.grid, a.tag.blocks));
    rec.lhs = schatten_norm(k, p);
    switch (hypothesis) {
        case BoundHypothesis::Seminorm: rec.rhs = seminorm(a, params.spec); break;
        case BoundHypothesis::Sobolev: rec.rhs = sobolev_norm(a, params.sobolev_s, p); break;
        case BoundHypothesis::Smoothed:
            rec.rhs = lp_norm(bessel_smooth(a, params.t, params.s), p);
            break;
    }
    if (rec.rhs > 0.0) {
        rec.ratio = rec.lhs / rec.rhs;
    } else if (rec.lhs == 0.0) {
        rec.ratio = 0.0;
    } else {
        rec.ratio = std::numeric_limits<double>::infinity();
        rec.flagged = true;
    }
    return rec;
}

struct TauContinuityRow {
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    double defect = 0.0;  // || Op_lo(a) - Op_hi(a) ||_p
};

inline std::vector<TauContinuityRow> tau_continuity_report(const SampledFunction& a,
                                                           const std::vector<double>& taus,
                                                           double p) {
    if (taus.size() < 2)
        throw std::invalid_argument("tau_continuity_report: need at least two tau values");
    std::vector<OperatorKernel> ops;
    ops.reserve(taus.size());
    for (double t : taus)
        ops.push_back(kernel_from_symbol(a, QuantizationParams(t, a.grid, a.tag.blocks)));
    std::vector<TauContinuityRow> rows;
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
        OperatorKernel diff{a.grid, ops[i].values - ops[i + 1].values};
        rows.push_back({taus[i], taus[i + 1], schatten_norm(diff, p)});
    }
    return rows;
}

}  // namespace psidolab
