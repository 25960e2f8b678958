#pragma once

#include <span>
#include <vector>

#include "bellsim/runner.hpp"

namespace bellsim {

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

struct PairTally {
    std::int64_t n_trials = 0;  // trials at this setting pair
    std::int64_t n_ready = 0;   // both arms event-ready (the N_AB denominator)
    std::int64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;  // among ready trials, both outcomes set

    std::int64_t observed() const { return n_pp + n_pm + n_mp + n_mm; }
};

struct CoincidenceTally {
    PairTally pair[2][2];  // [setting_a_index][setting_b_index]
};

CoincidenceTally tally_trials(const TrialSet& set);

// ---------------------------------------------------------------------------
// Analytic oracles for the ideal binary-phase model
// ---------------------------------------------------------------------------

/// (p_minus, p_plus) for one side: a step function of theta - alpha, undefined
/// when theta - alpha is an integral multiple of pi (throws std::domain_error).
std::pair<double, double> analytic_singles(PhaseAngle theta, PhaseAngle alpha);

struct CoincidenceProbs {
    double pp = 0.0, pm = 0.0, mp = 0.0, mm = 0.0;
};

/// Coincidence probabilities with the hidden phase equally likely 0 or pi:
/// P_xy = (p_x(a,0) p_y(b,0) + p_x(a,pi) p_y(b,pi)) / 2. Throws when either
/// angle is a multiple of pi.
CoincidenceProbs analytic_coincidence(PhaseAngle theta_a, PhaseAngle theta_b);

/// P_pp + P_mm - P_pm - P_mp, which collapses to sgn(sin a) * sgn(sin b).
double analytic_correlation(PhaseAngle theta_a, PhaseAngle theta_b);

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Fair estimator: (n_pp + n_mm - n_pm - n_mp) / n_ready. Non-detections
/// contribute zero to the numerator but stay in the denominator.
double correlation_fair(const PairTally& t);

/// Binomial standard error of the fair estimator.
double correlation_fair_err(const PairTally& t);

/// Post-selected estimator: same numerator over the observed coincidences only.
double correlation_postselected(const PairTally& t);

double correlation_postselected_err(const PairTally& t);

/// Which of the four correlations carries the minus sign in S.
enum class ChshSubtract { AB, ABprime, AprimeB, AprimeBprime };

/// S from four correlation estimates, each required to lie in [-1, 1].
double chsh(double e_ab, double e_ab_prime, double e_aprime_b, double e_aprime_bprime,
            ChshSubtract subtract = ChshSubtract::ABprime);

enum class Estimator { FairNAB, PostSelected };

struct ChshResult {
    double e[2][2] = {};      // correlation estimates, [a index][b index]
    double e_err[2][2] = {};  // binomial standard errors
    double s = 0.0;
    double s_err = 0.0;       // errors propagated in quadrature
    Estimator estimator = Estimator::FairNAB;
};

ChshResult chsh_from_tally(const CoincidenceTally& tally, Estimator estimator,
                           ChshSubtract subtract = ChshSubtract::ABprime);

// ---------------------------------------------------------------------------
// Curve and distribution analyses
// ---------------------------------------------------------------------------

/// (max - min) / (max + min) of a coincidence-rate curve.
double visibility(std::span<const double> rates);

struct Histogram {
    double lo = 0.0, hi = 0.0;  // uniform bins over [lo, hi]
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
};

Histogram diff_histogram(std::span<const double> values, int n_bins);

/// Fraction of |x| above half the largest |x|; 2/3 for an arcsine-distributed
/// sample, the double-peak diagnostic.
double tail_fraction_above_half_max(std::span<const double> values);

struct TwoCurveFit {
    double amplitude = 0.0;          // least-squares A of the +-A sin(theta) pair
    std::vector<int> labels;         // 0: nearer +A sin(theta); 1: nearer -A sin(theta)
    std::vector<double> residuals;   // distance to the assigned curve
    double rms_residual = 0.0;
};

/// Assign every scan point to the nearer of the two sign-opposite sine curves.
TwoCurveFit two_curve_decomposition(std::span<const double> thetas, std::span<const double> v_diffs);

}  // namespace bellsim
