#include <doctest.h>

#include <cmath>
#include <vector>

#include "bellsim/stats.hpp"
#include "support/stat_utils.hpp"

using namespace bellsim;

namespace {

// Brute force over the two phase classes, written independently of the
// implementation path: outcome on one side is the sign of sin(theta - alpha).
CoincidenceProbs brute_force_coincidence(double theta_a, double theta_b) {
    CoincidenceProbs p;
    for (double alpha : {0.0, kPi}) {
        const int oa = std::sin(theta_a - alpha) > 0.0 ? 1 : -1;
        const int ob = std::sin(theta_b - alpha) > 0.0 ? 1 : -1;
        if (oa > 0 && ob > 0) p.pp += 0.5;
        else if (oa > 0) p.pm += 0.5;
        else if (ob > 0) p.mp += 0.5;
        else p.mm += 0.5;
    }
    return p;
}

PairTally make_tally(std::int64_t n_ready, std::int64_t pp, std::int64_t pm, std::int64_t mp,
                     std::int64_t mm) {
    PairTally t;
    t.n_trials = n_ready;
    t.n_ready = n_ready;
    t.n_pp = pp;
    t.n_pm = pm;
    t.n_mp = mp;
    t.n_mm = mm;
    return t;
}

ExperimentConfig ideal_config() {
    ExperimentConfig cfg;
    cfg.source.pd_threshold = 0.0;
    cfg.settings.a.theta_set = PhaseAngle(kPi / 2);
    cfg.settings.a_prime.theta_set = PhaseAngle(kPi / 4);
    cfg.settings.b.theta_set = PhaseAngle(kPi / 2);
    cfg.settings.b_prime.theta_set = PhaseAngle(-kPi / 2);
    return cfg;
}

CoincidenceTally run_four_pairs(ExperimentConfig cfg, std::int64_t n_per_pair,
                                std::uint64_t seed) {
    CoincidenceTally tally;
    cfg.settings.selection = SelectionMode::FixedPair;
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            cfg.settings.fixed_a = ia;
            cfg.settings.fixed_b = ib;
            const TrialSet set =
                run_experiment(cfg, n_per_pair, mix64(seed + 2 * ia + ib));
            tally.pair[ia][ib] = tally_trials(set).pair[ia][ib];
        }
    return tally;
}

}  // namespace

TEST_CASE("analytic singles are the shifted step function") {
    const auto [m0, p0] = analytic_singles(PhaseAngle(kPi / 2), PhaseAngle(0.0));
    CHECK(m0 == 0.0);
    CHECK(p0 == 1.0);

    const auto [m1, p1] = analytic_singles(PhaseAngle(kPi / 2), PhaseAngle(kPi));
    CHECK(m1 == 1.0);
    CHECK(p1 == 0.0);

    CHECK_THROWS_AS(analytic_singles(PhaseAngle(0.0), PhaseAngle(0.0)), std::domain_error);
    CHECK_THROWS_AS(analytic_singles(PhaseAngle(kPi), PhaseAngle(0.0)), std::domain_error);
    CHECK_THROWS_AS(analytic_singles(PhaseAngle(kPi / 3), PhaseAngle(kPi / 3)), std::domain_error);
}

TEST_CASE("analytic coincidences match the two-class brute force") {
    for (int i = 1; i < 16; ++i) {
        for (int j = 1; j < 16; ++j) {
            const double ta = -kPi + i * kTwoPi / 16.0;
            const double tb = -kPi + j * kTwoPi / 16.0;
            if (i == 8 || j == 8) continue;  // multiples of pi
            const CoincidenceProbs got = analytic_coincidence(PhaseAngle(ta), PhaseAngle(tb));
            const CoincidenceProbs want = brute_force_coincidence(ta, tb);
            CHECK(got.pp == want.pp);
            CHECK(got.pm == want.pm);
            CHECK(got.mp == want.mp);
            CHECK(got.mm == want.mm);
            CHECK(got.pp + got.pm + got.mp + got.mm == 1.0);
        }
    }
    CHECK_THROWS_AS(analytic_coincidence(PhaseAngle(kPi / 2), PhaseAngle(kPi)), std::domain_error);
}

TEST_CASE("the P++ step takes values 0 and 1/2 as tabulated") {
    for (double tb : {0.3, 1.0, 2.5}) {
        CHECK(analytic_coincidence(PhaseAngle(kPi / 2), PhaseAngle(tb)).pp == 0.5);
        CHECK(analytic_coincidence(PhaseAngle(-kPi / 2), PhaseAngle(tb)).pp == 0.0);
        CHECK(analytic_coincidence(PhaseAngle(kPi / 2), PhaseAngle(-tb)).pp == 0.0);
        CHECK(analytic_coincidence(PhaseAngle(-kPi / 2), PhaseAngle(-tb)).pp == 0.5);
    }
}

TEST_CASE("any theta_A inside (0, pi) gives the same curve") {
    for (int j = 1; j < 16; ++j) {
        if (j == 8) continue;
        const double tb = -kPi + j * kTwoPi / 16.0;
        const CoincidenceProbs at_half = analytic_coincidence(PhaseAngle(kPi / 2), PhaseAngle(tb));
        const CoincidenceProbs at_quarter = analytic_coincidence(PhaseAngle(kPi / 4), PhaseAngle(tb));
        CHECK(at_half.pp == at_quarter.pp);
        CHECK(at_half.pm == at_quarter.pm);
        CHECK(at_half.mp == at_quarter.mp);
        CHECK(at_half.mm == at_quarter.mm);
    }
}

TEST_CASE("coincidences are not a function of the setting difference") {
    // Equal difference 5 pi / 8, one pair from each step family.
    const double d1 = 7.0 * kPi / 8.0 - kPi / 4.0;
    const double d2 = kPi / 8.0 - (-kPi / 2.0);
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-15));
    const double pp1 = analytic_coincidence(PhaseAngle(kPi / 4), PhaseAngle(7.0 * kPi / 8.0)).pp;
    const double pp2 = analytic_coincidence(PhaseAngle(-kPi / 2), PhaseAngle(kPi / 8.0)).pp;
    CHECK(pp1 == 0.5);
    CHECK(pp2 == 0.0);
}

TEST_CASE("analytic correlation is the sign product and factorizes") {
    CHECK(analytic_correlation(PhaseAngle(kPi / 2), PhaseAngle(kPi / 2)) == 1.0);
    CHECK(analytic_correlation(PhaseAngle(kPi / 2), PhaseAngle(-kPi / 2)) == -1.0);
    CHECK(analytic_correlation(PhaseAngle(kPi / 4), PhaseAngle(3.0 * kPi / 4.0)) == 1.0);
    for (int i = 1; i < 16; ++i) {
        for (int j = 1; j < 16; ++j) {
            if (i == 8 || j == 8) continue;
            const PhaseAngle ta(-kPi + i * kTwoPi / 16.0), tb(-kPi + j * kTwoPi / 16.0);
            const double sgn_product = (std::sin(ta.radians()) > 0 ? 1.0 : -1.0) *
                                       (std::sin(tb.radians()) > 0 ? 1.0 : -1.0);
            CHECK(analytic_correlation(ta, tb) == sgn_product);
            CHECK(analytic_correlation(ta, tb) ==
                  analytic_correlation(ta, PhaseAngle(kPi / 2)) *
                      analytic_correlation(PhaseAngle(kPi / 2), tb));
        }
    }
}

TEST_CASE("fair estimator keeps undetected pairs in the denominator") {
    CHECK(correlation_fair(make_tally(100, 50, 0, 0, 50)) == 1.0);
    CHECK(correlation_fair(make_tally(100, 25, 0, 0, 25)) == 0.5);
    CHECK(correlation_fair(make_tally(100, 25, 25, 25, 25)) == 0.0);
    CHECK_THROWS_AS(correlation_fair(make_tally(0, 0, 0, 0, 0)), std::domain_error);
}

TEST_CASE("post-selected estimator conditions on observed coincidences") {
    CHECK(correlation_postselected(make_tally(100, 25, 0, 0, 25)) == 1.0);
    CHECK(correlation_postselected(make_tally(100, 25, 25, 25, 25)) == 0.0);
    CHECK(correlation_postselected(make_tally(100, 40, 10, 10, 40)) == 0.6);
    CHECK_THROWS_AS(correlation_postselected(make_tally(100, 0, 0, 0, 0)), std::domain_error);
}

TEST_CASE("counting errors are the binomial ones") {
    const PairTally t = make_tally(100, 25, 0, 0, 25);
    // Fair: contributions +1 (p=1/2) and 0 (p=1/2); var = 1/2 - 1/4.
    CHECK(correlation_fair_err(t) == doctest::Approx(std::sqrt(0.25 / 100.0)).epsilon(1e-12));
    // Post-selected: all 50 observed pairs agree, zero spread.
    CHECK(correlation_postselected_err(t) == 0.0);
}

TEST_CASE("chsh combination and its domain") {
    CHECK(chsh(1.0, -1.0, 1.0, 1.0) == 4.0);
    CHECK(chsh(0.0, 0.0, 0.0, 0.0) == 0.0);
    const double e_ab = analytic_correlation(PhaseAngle(kPi / 2), PhaseAngle(kPi / 2));
    const double e_abp = analytic_correlation(PhaseAngle(kPi / 2), PhaseAngle(-kPi / 2));
    const double e_apb = analytic_correlation(PhaseAngle(kPi / 4), PhaseAngle(kPi / 2));
    const double e_apbp = analytic_correlation(PhaseAngle(kPi / 4), PhaseAngle(-kPi / 2));
    CHECK(chsh(e_ab, e_abp, e_apb, e_apbp) == 2.0);
    CHECK_THROWS_AS(chsh(1.1, 0.0, 0.0, 0.0), std::domain_error);

    // The subtracted term is configurable; relabelling keeps |S| <= 4.
    CHECK(chsh(1.0, -1.0, 1.0, 1.0, ChshSubtract::AB) == 0.0);
    CHECK(chsh(1.0, -1.0, 1.0, 1.0, ChshSubtract::AprimeBprime) == 0.0);
}

TEST_CASE("visibility of a curve") {
    const std::vector<double> step{0.0, 0.5, 0.5, 0.0};
    CHECK(visibility(step) == 1.0);
    const std::vector<double> flat{0.3, 0.3, 0.3};
    CHECK(visibility(flat) == 0.0);
    const std::vector<double> noisy{0.1, 1.0, 0.4};
    CHECK(visibility(noisy) == doctest::Approx(9.0 / 11.0).epsilon(1e-15));
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(visibility(zero), std::domain_error);
}

TEST_CASE("histogram bookkeeping") {
    const std::vector<double> same{1.0, 1.0, 1.0};
    const Histogram h = diff_histogram(same, 10);
    std::int64_t occupied = 0, total = 0;
    for (auto c : h.counts) {
        if (c > 0) ++occupied;
        total += c;
    }
    CHECK(occupied == 1);
    CHECK(total == h.total);
    CHECK(h.total == 3);

    const std::vector<double> empty;
    CHECK_THROWS_AS(diff_histogram(empty, 10), std::invalid_argument);
    CHECK_THROWS_AS(diff_histogram(same, 1), std::invalid_argument);
}

TEST_CASE("arcsine tail: two thirds of |X| sit above half the maximum") {
    RandomStream rng = derive_stream(300, 0, StreamRole::Source);
    const int n = 100000;
    std::vector<double> xs(n);
    for (double& x : xs) x = 2.0 * std::sin(rng.uniform01() * kTwoPi - kPi);
    CHECK(tail_fraction_above_half_max(xs) == doctest::Approx(2.0 / 3.0).epsilon(0.015));
}

TEST_CASE("noiseless arcsine histogram passes the chi-square test") {
    RandomStream rng = derive_stream(301, 0, StreamRole::Source);
    const int n = 20000;
    const double amp = 1.7;
    std::vector<double> xs(n);
    for (double& x : xs) x = amp * std::sin(rng.uniform01() * kTwoPi - kPi);

    const int bins = 20;
    std::vector<std::int64_t> counts(bins, 0);
    for (double x : xs) {
        int idx = static_cast<int>((x + amp) / (2.0 * amp) * bins);
        idx = std::clamp(idx, 0, bins - 1);
        ++counts[idx];
    }
    std::vector<double> expected(bins);
    for (int i = 0; i < bins; ++i) {
        const double lo = -amp + 2.0 * amp * i / bins;
        const double hi = -amp + 2.0 * amp * (i + 1) / bins;
        expected[i] = n * (std::asin(std::clamp(hi / amp, -1.0, 1.0)) -
                           std::asin(std::clamp(lo / amp, -1.0, 1.0))) /
                      kPi;
    }
    const auto gof = testutil::chi_square_gof(counts, expected);
    CHECK(gof.pvalue >= 0.001);
}

TEST_CASE("two-curve decomposition separates the binary classes") {
    RandomStream rng = derive_stream(302, 0, StreamRole::Source);
    const int n = 600;
    const double amp = 1.4;
    std::vector<double> thetas(n), vs(n);
    std::vector<int> truth(n);
    for (int i = 0; i < n; ++i) {
        thetas[i] = -kPi + (i + 0.5) * kTwoPi / n;
        truth[i] = rng.coin() ? 1 : 0;
        vs[i] = (truth[i] == 0 ? amp : -amp) * std::sin(thetas[i]);
    }
    const TwoCurveFit clean = two_curve_decomposition(thetas, vs);
    CHECK(clean.amplitude == doctest::Approx(amp).epsilon(1e-12));
    CHECK(clean.rms_residual < 1e-12);
    for (int i = 0; i < n; ++i) {
        if (std::fabs(std::sin(thetas[i])) < 1e-9) continue;
        CHECK(clean.labels[i] == truth[i]);
    }

    // With noise, mistakes happen only where the two curves cross.
    std::vector<double> noisy(vs);
    for (double& v : noisy) v += 0.05 * amp * std::sqrt(2.0) * rng.normal01();
    const TwoCurveFit fit = two_curve_decomposition(thetas, noisy);
    for (int i = 0; i < n; ++i)
        if (fit.labels[i] != truth[i]) CHECK(std::fabs(std::sin(thetas[i])) < 0.35);
}

TEST_CASE("a uniform hidden phase breaks the two-curve model") {
    RandomStream rng = derive_stream(303, 0, StreamRole::Source);
    const int n = 600;
    const double amp = 1.4;
    std::vector<double> thetas(n), binary(n), uniform(n);
    for (int i = 0; i < n; ++i) {
        thetas[i] = -kPi + (i + 0.5) * kTwoPi / n;
        binary[i] = (rng.coin() ? -amp : amp) * std::sin(thetas[i]);
        uniform[i] = amp * std::sin(thetas[i] - rng.uniform01() * kTwoPi);
    }
    const double rms_binary = two_curve_decomposition(thetas, binary).rms_residual;
    const double rms_uniform = two_curve_decomposition(thetas, uniform).rms_residual;
    CHECK(rms_uniform > 5.0 * (rms_binary + 1e-12));
    CHECK(rms_uniform > 0.1 * amp);
}

TEST_CASE("Monte Carlo frequencies match the analytic coincidences") {
    const ExperimentConfig cfg = ideal_config();
    const TrialSet set = run_experiment(cfg, 100000, 304);
    const CoincidenceTally tally = tally_trials(set);
    const PhaseAngle thetas_a[2] = {cfg.settings.a.theta_set, cfg.settings.a_prime.theta_set};
    const PhaseAngle thetas_b[2] = {cfg.settings.b.theta_set, cfg.settings.b_prime.theta_set};
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            const PairTally& t = tally.pair[ia][ib];
            REQUIRE(t.n_ready > 1000);
            const CoincidenceProbs p = analytic_coincidence(thetas_a[ia], thetas_b[ib]);
            const double n = static_cast<double>(t.n_ready);
            const auto check = [&](std::int64_t count, double prob) {
                const double sigma = std::sqrt(prob * (1.0 - prob) / n);
                CHECK(std::fabs(count / n - prob) <= 3.0 * sigma + 1e-12);
            };
            check(t.n_pp, p.pp);
            check(t.n_pm, p.pm);
            check(t.n_mp, p.mp);
            check(t.n_mm, p.mm);
        }
}

TEST_CASE("fair CHSH stays within the local bound on randomized configs") {
    RandomStream rng = derive_stream(305, 0, StreamRole::Source);
    for (int rep = 0; rep < 8; ++rep) {
        ExperimentConfig cfg;
        cfg.source.alpha_mode = rng.coin() ? AlphaMode::Binary : AlphaMode::Uniform;
        cfg.source.sigma_omega = rng.coin() ? 0.0 : 0.3 * rng.uniform01();
        cfg.source.amplitude_scale = 0.5 + 1.5 * rng.uniform01();
        cfg.source.tap_reflectance = 0.05 + 0.25 * rng.uniform01();
        cfg.source.pd_threshold = 0.2 * rng.uniform01();
        cfg.source.pd_efficiency = 0.6 + 0.4 * rng.uniform01();
        cfg.detector_a.noise_sigma = rng.coin() ? 0.0 : 0.5 * rng.uniform01();
        cfg.detector_b.noise_sigma = cfg.detector_a.noise_sigma;
        if (rep % 2 == 1) {
            cfg.detector_a.discriminator_threshold = 0.5 + rng.uniform01();
            cfg.detector_b.discriminator_threshold = cfg.detector_a.discriminator_threshold;
        }
        cfg.settings.a.theta_set = PhaseAngle(rng.uniform01() * kTwoPi - kPi);
        cfg.settings.a_prime.theta_set = PhaseAngle(rng.uniform01() * kTwoPi - kPi);
        cfg.settings.b.theta_set = PhaseAngle(rng.uniform01() * kTwoPi - kPi);
        cfg.settings.b_prime.theta_set = PhaseAngle(rng.uniform01() * kTwoPi - kPi);
        cfg.settings.a.path_delay = 2.0 * rng.uniform01();
        cfg.settings.b.path_delay = 2.0 * rng.uniform01();

        const TrialSet set = run_experiment(cfg, 20000, 306 + rep);
        const ChshResult fair = chsh_from_tally(tally_trials(set), Estimator::FairNAB);
        CHECK(std::fabs(fair.s) <= 2.0 + 5.0 * fair.s_err);
    }
}

TEST_CASE("post-selection inflates S in the discriminator sweep") {
    ExperimentConfig cfg;
    cfg.source.alpha_mode = AlphaMode::Uniform;
    cfg.source.amplitude_mode = AmplitudeMode::Fixed;
    cfg.source.amplitude_scale = 1.0;
    cfg.source.tap_reflectance = 0.5;
    cfg.source.pd_threshold = 0.0;
    cfg.settings.a.theta_set = PhaseAngle(0.0);
    cfg.settings.a_prime.theta_set = PhaseAngle(kPi / 2);
    cfg.settings.b.theta_set = PhaseAngle(kPi / 4);
    cfg.settings.b_prime.theta_set = PhaseAngle(3.0 * kPi / 4.0);

    const double e_main = std::sqrt(0.5);
    const double pedestal = 0.5 * (e_main * e_main + 1.0);
    const double modulation = e_main;

    double prev = -10.0;
    for (double tau : {0.1, 0.2, 0.3}) {
        cfg.detector_a.discriminator_threshold = pedestal + tau * modulation;
        cfg.detector_b.discriminator_threshold = pedestal + tau * modulation;
        const CoincidenceTally tally = run_four_pairs(cfg, 10000, 307);
        const ChshResult post = chsh_from_tally(tally, Estimator::PostSelected);
        const ChshResult fair = chsh_from_tally(tally, Estimator::FairNAB);
        CHECK(post.s >= prev);
        CHECK(std::fabs(fair.s) <= 2.0 + 5.0 * fair.s_err);
        prev = post.s;
    }
    CHECK(prev > 2.0);
}
