#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "selmut/limits.hpp"

using namespace selmut;

namespace {

const auto kingman = FitnessModel::kingman();
const auto lenski = FitnessModel::lenski(100.0);

const Measure two_low = make_measure({{0.2, 0.5}, {0.4, 0.5}});
const Measure two_high = make_measure({{0.5, 0.5}, {0.9, 0.5}});

Measure random_measure(std::mt19937_64& rng, int max_atoms = 5) {
    std::uniform_int_distribution<int> count(1, max_atoms);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Atom> atoms;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) atoms.push_back({unit(rng), unit(rng) + 0.01});
    return make_measure(std::move(atoms), 1.0).normalized();
}

}  // namespace

TEST(KingmanCriterion, Examples) {
    EXPECT_DOUBLE_EQ(kingman_criterion(Measure::dirac(0), 0.3, 1.0), 0.3);
    EXPECT_EQ(kingman_criterion(Measure::dirac(1), 0.3, 1.0), kInf);
    EXPECT_NEAR(kingman_criterion(two_low, 0.8, 1.0), 0.8 * (0.5 / 0.8 + 0.5 / 0.6), 1e-14);
    EXPECT_THROW(kingman_criterion(Measure::dirac(0), 0.5, 0.0), std::invalid_argument);
}

TEST(SolveKingman, Examples) {
    // The solver stops on the equation residual; at beta = 0.9 the slope is 1/9, so the root is looser.
    for (double beta : {0.2, 0.5, 0.9}) EXPECT_NEAR(solve_kingman_s(Measure::dirac(1), beta, 1).root, 1.0, 1e-10);
    EXPECT_NEAR(solve_kingman_s(Measure::dirac(0.5), 0.8, 1).root, 0.5, 1e-12);
    // 0.4s/(s-0.04) + 0.4s/(s-0.08) = 1 reduces to s^2 - 0.36 s + 0.016 = 0.
    const double closed = (0.36 + std::sqrt(0.36 * 0.36 - 4 * 0.016)) / 2;
    const auto r = solve_kingman_s(two_low, 0.8, 1);
    EXPECT_NEAR(r.root, closed, 1e-11);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_LE(r.iterations, 200);
    const double brute = oracle::bisect([](double s) { return 0.4 * s / (s - 0.04) + 0.4 * s / (s - 0.08) - 1; },
                                        0.2, 10.0);
    EXPECT_NEAR(r.root, brute, 1e-11);
}

TEST(SolveKingman, NoRootInCaseTwo) {
    EXPECT_THROW(solve_kingman_s(Measure::dirac(0), 0.5, 1), NoRootError);
}

TEST(KingmanLimit, Examples) {
    auto l = kingman_limit(Measure::dirac(0), 0.5, 1);
    EXPECT_EQ(l.case_tag, LimitCase::case2);
    EXPECT_NEAR(l.atom_at_a, 0.5, 1e-15);
    EXPECT_NEAR(l.ac_part.mass_at(0), 0.5, 1e-15);

    l = kingman_limit(Measure::dirac(1), 0.5, 1);
    EXPECT_EQ(l.case_tag, LimitCase::case1);
    EXPECT_LE(total_variation(l.distribution(), Measure::dirac(1)), 1e-12);

    l = kingman_limit(Measure::dirac(0.5), 0.5, 1);
    EXPECT_EQ(l.case_tag, LimitCase::case2);
    EXPECT_NEAR(l.criterion, 1.0, 1e-15);
    EXPECT_NEAR(l.atom_at_a, 0.0, 1e-15);
    EXPECT_LE(total_variation(l.distribution(), Measure::dirac(0.5)), 1e-12);
}

TEST(LenskiCriterion, Examples) {
    EXPECT_NEAR(lenski_criterion(Measure::dirac(0), 0.5, 100, 1), 0.5 / (1 - 0.005), 1e-14);
    EXPECT_EQ(lenski_criterion(Measure::dirac(0.7), 0.5, 100, 0.7), kInf);
    const double r = 0.2 / 100;
    const double hand = 0.4 / (1 - std::pow(r, 0.5)) + 0.4 / (1 - std::pow(r, 0.1));
    EXPECT_NEAR(lenski_criterion(two_high, 0.8, 100, 1), hand, 1e-13);
    EXPECT_GT(hand, 1.28);
    EXPECT_LT(hand, 1.29);
}

TEST(SolveLenski, Examples) {
    for (double m : {1.0, 0.5}) {
        const auto r = solve_lenski_s(Measure::dirac(m), 0.3, 100, m);
        EXPECT_NEAR(r.root, std::log(100.0) / m, 1e-10);
    }
    // q = delta_0: the criterion stays below 1 for every beta < 1.
    EXPECT_LT(lenski_criterion(Measure::dirac(0), 0.999, 100, 1), 1.0);
    EXPECT_THROW(solve_lenski_s(Measure::dirac(0), 0.999, 100, 1), NoRootError);

    const auto r = solve_lenski_s(two_high, 0.8, 100, 1);
    EXPECT_LT(r.root, std::log(500.0));
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_LE(r.iterations, 200);
    const auto f = [](double s) {
        return 0.4 / (1 - 0.002 * std::exp(0.5 * s)) + 0.4 / (1 - 0.002 * std::exp(0.9 * s)) - 1;
    };
    EXPECT_NEAR(r.root, oracle::bisect(f, -50.0, std::log(500.0) - 1e-9), 1e-10);
}

TEST(LenskiLimit, Examples) {
    auto l = lenski_limit(Measure::dirac(0), 0.5, 100, 1);
    EXPECT_EQ(l.case_tag, LimitCase::case2);
    const double m0 = 0.5 * 100 / (100 - 1 + 0.5);
    EXPECT_NEAR(l.ac_part.mass_at(0), m0, 1e-14);
    EXPECT_NEAR(l.atom_at_a, 1 - m0, 1e-14);

    l = lenski_limit(Measure::dirac(1), 0.5, 100, 1);
    EXPECT_LE(total_variation(l.distribution(), Measure::dirac(1)), 1e-12);

    l = lenski_limit(two_high, 0.8, 100, 1);
    EXPECT_EQ(l.case_tag, LimitCase::case1);
    EXPECT_EQ(l.atom_at_a, 0.0);
    EXPECT_NEAR(l.distribution().total_mass(), 1.0, 1e-9);
}

TEST(Limits, CustomModelHasNoClosedForm) {
    const auto custom = FitnessModel::custom("x2", [](double x, const Measure&) { return x * x; });
    EXPECT_THROW(limit_for(custom, Measure::dirac(0), 0.5, 1), std::invalid_argument);
}

TEST(Limits, CaseBoundaryContinuity) {
    // K = criterion / beta for q = 0.5 d0.2 + 0.5 d0.4; the boundary sits at beta = 1/K.
    const double K = 0.5 / 0.8 + 0.5 / 0.6;
    const double beta_star = 1 / K;
    const auto above = kingman_limit(two_low, beta_star * (1 + 2e-9), 1);
    const auto below = kingman_limit(two_low, beta_star * (1 - 2e-9), 1);
    EXPECT_EQ(above.case_tag, LimitCase::case1);
    EXPECT_EQ(below.case_tag, LimitCase::case2);
    EXPECT_LE(total_variation(above.distribution(), below.distribution()), 1e-6);
    EXPECT_NEAR(*above.root, *below.root, 1e-6);

    // Lenski: vary beta until the criterion crosses 1.
    const double lb = oracle::bisect([](double b) { return lenski_criterion(two_high, b, 100, 1) - 1; }, 0.1, 0.9);
    const auto l1 = lenski_limit(two_high, lb + 1e-9, 100, 1);
    const auto l2 = lenski_limit(two_high, lb - 1e-9, 100, 1);
    EXPECT_EQ(l1.case_tag, LimitCase::case1);
    EXPECT_EQ(l2.case_tag, LimitCase::case2);
    EXPECT_LE(total_variation(l1.distribution(), l2.distribution()), 1e-6);
}

TEST(LimitsProperties, FixedPoint) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int cases[2] = {0, 0};
    for (int i = 0; i < 40; ++i) {
        const auto q = random_measure(rng);
        const double beta = unit(rng);
        const double a = std::max(upper_support(q), 0.5) + 0.5 * unit(rng);
        for (const auto* model : {&kingman, &lenski}) {
            const auto l = limit_for(*model, q, beta, a);
            const auto p = l.distribution();
            ++cases[static_cast<int>(l.case_tag)];
            EXPECT_LE(total_variation(step(*model, p, truncate_at(q, a), beta), p), 1e-10)
                << model->name() << " case " << static_cast<int>(l.case_tag);
        }
    }
    EXPECT_GT(cases[0], 0);
    EXPECT_GT(cases[1], 0);
}

TEST(LimitsProperties, OracleAgreementFromDiracAtA) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.3, 0.9);
    int compared = 0;
    for (int i = 0; i < 10; ++i) {
        const auto q = random_measure(rng, 3);
        const double beta = unit(rng);
        for (double gamma : {0.0, 100.0}) {
            const auto model = gamma > 0 ? lenski : kingman;
            const auto l = limit_for(model, q, beta, 1.0);
            // Only strong convergence cases: Case1, or an atom of q at M.
            if (l.case_tag != LimitCase::case1) continue;
            oracle::Dist qd;
            for (const auto& a : q.atoms()) qd[a.x] += a.m;
            const auto o = oracle::run({{1.0, 1.0}}, qd, beta, gamma, 20000);
            std::vector<Atom> atoms;
            for (auto [x, m] : o) atoms.push_back({x, m});
            EXPECT_LE(total_variation(make_measure(atoms), l.distribution()), 1e-6);
            ++compared;
        }
    }
    EXPECT_GE(compared, 5);
}

TEST(Condensation, Examples) {
    const auto q = Measure::dirac(0);
    auto l = kingman_limit(q, 0.5, 1);
    auto t = iterate(kingman, Measure::dirac(1), q, 0.5, {});
    auto r = condensation_report(l, t);
    EXPECT_NEAR(r.limit_atom, 0.5, 1e-15);
    EXPECT_GT(r.terminal_atom_mass_at_M, 0.0);
    EXPECT_FALSE(r.condensation);

    l = kingman_limit(Measure::dirac(1), 0.5, 1);
    t = iterate(kingman, Measure::dirac(1), Measure::dirac(1), 0.5, {});
    EXPECT_FALSE(condensation_report(l, t).condensation);

    // p0 and q strictly below M = 1, Case2 limit.
    l = kingman_limit(Measure::dirac(0), 0.5, 1);
    IterateOptions opts;
    opts.bound = 1.0;
    t = iterate(kingman, Measure::dirac(0.5), Measure::dirac(0), 0.5, {1000, 1e-12}, opts);
    r = condensation_report(l, t);
    EXPECT_TRUE(r.condensation);
    EXPECT_EQ(r.max_trajectory_atom_mass_at_M, 0.0);
}
