#include "bellsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bellsim {

CoincidenceTally tally_trials(const TrialSet& set) {
    CoincidenceTally tally;
    for (const TrialRecord& rec : set.records) {
        PairTally& t = tally.pair[rec.setting_a_index][rec.setting_b_index];
        ++t.n_trials;
        if (!(rec.ready_a && rec.ready_b)) continue;
        ++t.n_ready;
        if (rec.outcome_a == Outcome::None || rec.outcome_b == Outcome::None) continue;
        const bool a_plus = rec.outcome_a == Outcome::Plus;
        const bool b_plus = rec.outcome_b == Outcome::Plus;
        if (a_plus && b_plus) ++t.n_pp;
        else if (a_plus && !b_plus) ++t.n_pm;
        else if (!a_plus && b_plus) ++t.n_mp;
        else ++t.n_mm;
    }
    return tally;
}

std::pair<double, double> analytic_singles(PhaseAngle theta, PhaseAngle alpha) {
    const double d = PhaseAngle(theta.radians() - alpha.radians()).radians();
    if (d == 0.0 || d == kPi)
        throw std::domain_error(
            "analytic_singles: probabilities are undefined at integral multiples of pi");
    const double p_minus = d < 0.0 ? 1.0 : 0.0;
    return {p_minus, 1.0 - p_minus};
}

CoincidenceProbs analytic_coincidence(PhaseAngle theta_a, PhaseAngle theta_b) {
    const PhaseAngle zero(0.0), pi(kPi);
    const auto [am0, ap0] = analytic_singles(theta_a, zero);
    const auto [am1, ap1] = analytic_singles(theta_a, pi);
    const auto [bm0, bp0] = analytic_singles(theta_b, zero);
    const auto [bm1, bp1] = analytic_singles(theta_b, pi);
    CoincidenceProbs p;
    p.pp = 0.5 * (ap0 * bp0 + ap1 * bp1);
    p.pm = 0.5 * (ap0 * bm0 + ap1 * bm1);
    p.mp = 0.5 * (am0 * bp0 + am1 * bp1);
    p.mm = 0.5 * (am0 * bm0 + am1 * bm1);
    return p;
}

double analytic_correlation(PhaseAngle theta_a, PhaseAngle theta_b) {
    const CoincidenceProbs p = analytic_coincidence(theta_a, theta_b);
    return p.pp + p.mm - p.pm - p.mp;
}

double correlation_fair(const PairTally& t) {
    if (t.n_ready <= 0)
        throw std::domain_error("correlation_fair: no event-ready pairs (empty denominator)");
    return static_cast<double>(t.n_pp + t.n_mm - t.n_pm - t.n_mp) /
           static_cast<double>(t.n_ready);
}

double correlation_fair_err(const PairTally& t) {
    // Per-trial contribution is +1, -1 or 0; variance = p(+1) + p(-1) - E^2.
    const double e = correlation_fair(t);
    const double n = static_cast<double>(t.n_ready);
    const double p_nonzero = static_cast<double>(t.observed()) / n;
    const double var = std::max(0.0, p_nonzero - e * e);
    return std::sqrt(var / n);
}

double correlation_postselected(const PairTally& t) {
    const std::int64_t n = t.observed();
    if (n <= 0)
        throw std::domain_error(
            "correlation_postselected: no observed coincidences (empty denominator)");
    return static_cast<double>(t.n_pp + t.n_mm - t.n_pm - t.n_mp) / static_cast<double>(n);
}

double correlation_postselected_err(const PairTally& t) {
    const double e = correlation_postselected(t);
    const double n = static_cast<double>(t.observed());
    return std::sqrt(std::max(0.0, 1.0 - e * e) / n);
}

double chsh(double e_ab, double e_ab_prime, double e_aprime_b, double e_aprime_bprime,
            ChshSubtract subtract) {
    for (double e : {e_ab, e_ab_prime, e_aprime_b, e_aprime_bprime})
        if (!(std::fabs(e) <= 1.0))
            throw std::domain_error("chsh: correlation estimates must lie in [-1, 1]");
    switch (subtract) {
        case ChshSubtract::AB:           return -e_ab + e_ab_prime + e_aprime_b + e_aprime_bprime;
        case ChshSubtract::ABprime:      return e_ab - e_ab_prime + e_aprime_b + e_aprime_bprime;
        case ChshSubtract::AprimeB:      return e_ab + e_ab_prime - e_aprime_b + e_aprime_bprime;
        case ChshSubtract::AprimeBprime: return e_ab + e_ab_prime + e_aprime_b - e_aprime_bprime;
    }
    throw std::logic_error("chsh: bad subtract enum");
}

ChshResult chsh_from_tally(const CoincidenceTally& tally, Estimator estimator,
                           ChshSubtract subtract) {
    ChshResult r;
    r.estimator = estimator;
    double err_sq = 0.0;
    for (int ia = 0; ia < 2; ++ia) {
        for (int ib = 0; ib < 2; ++ib) {
            const PairTally& t = tally.pair[ia][ib];
            if (estimator == Estimator::FairNAB) {
                r.e[ia][ib] = correlation_fair(t);
                r.e_err[ia][ib] = correlation_fair_err(t);
            } else {
                r.e[ia][ib] = correlation_postselected(t);
                r.e_err[ia][ib] = correlation_postselected_err(t);
            }
            err_sq += r.e_err[ia][ib] * r.e_err[ia][ib];
        }
    }
    r.s = chsh(r.e[0][0], r.e[0][1], r.e[1][0], r.e[1][1], subtract);
    r.s_err = std::sqrt(err_sq);
    return r;
}

double visibility(std::span<const double> rates) {
    if (rates.empty()) throw std::invalid_argument("visibility: empty curve");
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    const double sum = *hi + *lo;
    if (sum == 0.0) throw std::domain_error("visibility: degenerate curve (max + min = 0)");
    return (*hi - *lo) / sum;
}

Histogram diff_histogram(std::span<const double> values, int n_bins) {
    if (values.empty()) throw std::invalid_argument("diff_histogram: empty input");
    if (n_bins < 2) throw std::invalid_argument("diff_histogram: n_bins must be >= 2");

    Histogram h;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo;
    h.hi = *hi;
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    const double width = (h.hi - h.lo) / n_bins;
    for (double v : values) {
        int idx = width > 0.0 ? static_cast<int>((v - h.lo) / width) : 0;
        idx = std::clamp(idx, 0, n_bins - 1);  // the maximum lands in the last bin
        ++h.counts[static_cast<std::size_t>(idx)];
        ++h.total;
    }
    return h;
}

double tail_fraction_above_half_max(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("tail_fraction: empty input");
    double x_max = 0.0;
    for (double v : values) x_max = std::max(x_max, std::fabs(v));
    std::int64_t n_tail = 0;
    for (double v : values)
        if (std::fabs(v) > 0.5 * x_max) ++n_tail;
    return static_cast<double>(n_tail) / static_cast<double>(values.size());
}

TwoCurveFit two_curve_decomposition(std::span<const double> thetas,
                                    std::span<const double> v_diffs) {
    if (thetas.empty() || thetas.size() != v_diffs.size())
        throw std::invalid_argument("two_curve_decomposition: need matching non-empty inputs");

    // Least squares over the union of the two curves: with each point assigned
    // to the nearer branch c_i = sgn(v_i sin theta_i), the optimum is
    // A = sum |v_i sin theta_i| / sum sin^2 theta_i, and the assignment is
    // independent of A > 0, so no iteration is needed.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double s = std::sin(thetas[i]);
        num += std::fabs(v_diffs[i] * s);
        den += s * s;
    }
    if (den == 0.0)
        throw std::invalid_argument("two_curve_decomposition: all points at sin(theta) = 0");

    TwoCurveFit fit;
    fit.amplitude = num / den;
    fit.labels.resize(thetas.size());
    fit.residuals.resize(thetas.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double s = std::sin(thetas[i]);
        const int label = v_diffs[i] * s >= 0.0 ? 0 : 1;
        const double curve = (label == 0 ? fit.amplitude : -fit.amplitude) * s;
        fit.labels[i] = label;
        fit.residuals[i] = std::fabs(v_diffs[i] - curve);
        sq += fit.residuals[i] * fit.residuals[i];
    }
    fit.rms_residual = std::sqrt(sq / static_cast<double>(thetas.size()));
    return fit;
}

}  // namespace bellsim
