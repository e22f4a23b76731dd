#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "popcode/infotheory.hpp"
#include "popcode/shift_search.hpp"

namespace {

using popcode::Dataset;
using popcode::MiEstimate;
using popcode::PairSet;
using popcode::SpikeTrain;
using popcode::Stimulus;

TEST(MiMixed, ConstantPatternIsExactlyZero) {
    std::mt19937_64 rng(41);
    std::vector<double> x(500);
    for (double& v : x) v = popcode::uniform_real(rng);
    const PairSet pairs = fixtures::pair_set(x, std::vector<std::uint64_t>(500, 7));
    EXPECT_EQ(popcode::mi_mixed(pairs, 3), 0.0);
}

TEST(MiMixed, RecoversOneBitForThresholdPattern) {
    std::mt19937_64 rng(42);
    std::vector<double> x(10000);
    std::vector<std::uint64_t> w(10000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = popcode::uniform_real(rng);
        w[i] = x[i] >= 0.5 ? 1 : 0;
    }
    const double bits = popcode::mi_mixed(fixtures::pair_set(x, w), 3);
    EXPECT_NEAR(bits, 1.0, 0.05);
}

TEST(MiMixed, IndependentPatternIsNearZero) {
    std::mt19937_64 rng(43);
    std::vector<double> x(10000);
    std::vector<std::uint64_t> w(10000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = popcode::uniform_real(rng);
        w[i] = rng() & 1;
    }
    const double bits = popcode::mi_mixed(fixtures::pair_set(x, w), 3);
    EXPECT_NEAR(bits, 0.0, 0.02);
}

TEST(MiMixed, AgreesWithPluginOnQuantizedAmplitudes) {
    // 64 amplitude levels, 8 pattern classes, correlated with flip noise.
    std::mt19937_64 rng(44);
    const std::size_t n = 20000;
    std::vector<double> x(n);
    std::vector<std::uint64_t> w(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = rng() % 64;
        x[i] = (static_cast<double>(q[i]) + 0.5) / 64.0;
        w[i] = popcode::uniform_real(rng) < 0.25 ? rng() % 8 : q[i] / 8;
    }
    const double knn = popcode::mi_mixed(fixtures::pair_set(x, w), 3);
    const double plugin = oracles::plugin_mi(q, w);
    EXPECT_NEAR(knn, plugin, 0.1);
}

TEST(MiMixed, PermutationInvariant) {
    std::mt19937_64 rng(45);
    std::vector<double> x(400);
    std::vector<std::uint64_t> w(400);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = popcode::uniform_real(rng);
        w[i] = rng() % 3;
    }
    const double before = popcode::mi_mixed(fixtures::pair_set(x, w), 3);
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0u);
    popcode::shuffle_in_place(order, rng);
    std::vector<double> px(x.size());
    std::vector<std::uint64_t> pw(w.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        px[i] = x[order[i]];
        pw[i] = w[order[i]];
    }
    // invariant up to floating-point summation order
    EXPECT_NEAR(popcode::mi_mixed(fixtures::pair_set(px, pw), 3), before, 1e-12);
}

TEST(MiMixed, InvariantUnderPositiveAffineAmplitudeMaps) {
    std::mt19937_64 rng(46);
    std::vector<double> x(600);
    std::vector<std::uint64_t> w(600);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = popcode::uniform_real(rng);
        w[i] = x[i] > 0.3 ? 1 : 0;
    }
    const double before = popcode::mi_mixed(fixtures::pair_set(x, w), 3);
    std::vector<double> scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 4.0 * x[i] - 2.5;
    // neighbour ranks are unchanged, so the estimate moves by at most
    // floating-point noise in the ball counts
    EXPECT_NEAR(popcode::mi_mixed(fixtures::pair_set(scaled, w), 3), before, 1e-9);
}

TEST(MiMixed, MatchesNaiveTranscriptionOnAdversarialInputs) {
    // Random small pair sets with duplicated amplitudes, singleton classes,
    // tiny classes (k clamping), and two-neuron symbols; the sorted-array
    // fast path must agree with the quadratic-time transcription.
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 20 + rng() % 200;
        const std::size_t neurons = 1 + rng() % 2;
        const std::uint64_t amplitude_levels = 2 + rng() % 12;  // forces exact ties
        const std::uint64_t class_count = 2 + rng() % 6;
        const bool quantized = (rng() & 1) != 0;

        popcode::PairSet pairs;
        pairs.window_length = 1;
        pairs.shifts.assign(neurons, 0);
        pairs.neuron_count = neurons;
        std::vector<std::vector<std::uint64_t>> symbols(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double amp =
                quantized
                    ? static_cast<double>(popcode::uniform_index(rng, amplitude_levels))
                    : popcode::uniform_real(rng);
            pairs.amplitudes.push_back(amp);
            for (std::size_t j = 0; j < neurons; ++j) {
                const std::uint64_t symbol = popcode::uniform_index(rng, class_count);
                pairs.patterns.push_back(symbol);
                symbols[i].push_back(symbol);
            }
        }
        double fast = 0.0;
        bool threw = false;
        try {
            fast = popcode::mi_mixed(pairs, 3);
        } catch (const std::invalid_argument&) {
            threw = true;  // every class a singleton; the oracle domain excludes this
        }
        if (threw) continue;
        EXPECT_NEAR(fast, oracles::naive_mixed_mi(pairs.amplitudes, symbols, 3), 1e-10)
            << "trial " << trial << " n=" << n << " neurons=" << neurons;
    }
}

TEST(MiMixed, RejectsDegenerateInputs) {
    EXPECT_THROW(popcode::mi_mixed(fixtures::pair_set({0.1, 0.2}, {0, 1}), 3),
                 std::invalid_argument);
    // every class a singleton
    EXPECT_THROW(popcode::mi_mixed(fixtures::pair_set({0.1, 0.2, 0.3, 0.4}, {0, 1, 2, 3}), 3),
                 std::invalid_argument);
}

TEST(Extrapolate, RecoversExactQuadratic) {
    const std::vector<std::pair<int, double>> points = {
        {1, 3.5}, {2, 2.625}, {4, 2.28125}};  // a=2, b=1, c=0.5
    const popcode::QuadFit fit = popcode::extrapolate_mi(points);
    EXPECT_NEAR(fit.a, 2.0, 1e-9);
    EXPECT_NEAR(fit.b, 1.0, 1e-9);
    EXPECT_NEAR(fit.c, 0.5, 1e-9);
}

TEST(Extrapolate, ConstantPointsGiveConstantFit) {
    const popcode::QuadFit fit =
        popcode::extrapolate_mi({{2, 1.25}, {5, 1.25}, {9, 1.25}, {16, 1.25}});
    EXPECT_NEAR(fit.a, 1.25, 1e-12);
    EXPECT_NEAR(fit.b, 0.0, 1e-10);
    EXPECT_NEAR(fit.c, 0.0, 1e-10);
}

TEST(Extrapolate, RejectsTooFewDistinctPoints) {
    EXPECT_THROW(popcode::extrapolate_mi({{1, 0.5}, {2, 0.75}}), std::invalid_argument);
    EXPECT_THROW(popcode::extrapolate_mi({{1, 0.5}, {2, 0.75}, {2, 0.75}}),
                 std::invalid_argument);
}

TEST(Extrapolate, PropertyRecoversRandomCoefficients) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = popcode::uniform_real(rng) * 10.0 - 5.0;
        const double b = popcode::uniform_real(rng) * 10.0 - 5.0;
        const double c = popcode::uniform_real(rng) * 10.0 - 5.0;
        std::vector<int> lengths;
        for (int t = 1; t <= 40; ++t) lengths.push_back(t);
        popcode::shuffle_in_place(lengths, rng);
        lengths.resize(3 + rng() % 4);
        std::vector<std::pair<int, double>> points;
        for (int t : lengths) {
            points.emplace_back(t, oracles::inverse_quadratic(a, b, c, t));
        }
        const popcode::QuadFit fit = popcode::extrapolate_mi(points);
        EXPECT_NEAR(fit.a, a, 1e-9);
        EXPECT_NEAR(fit.b, b, 1e-9);
        EXPECT_NEAR(fit.c, c, 1e-9);
        // residual at the sampled points
        for (const auto& [t, value] : points) {
            EXPECT_NEAR(popcode::quad_eval(fit, t), value, 1e-9);
        }
    }
}

TEST(MiWindowed, AllZeroTrainsCarryNothing) {
    const Dataset dataset = fixtures::uniform_noise_dataset(10, 120, 48);
    std::vector<std::vector<SpikeTrain>> trains;
    for (const auto& s : dataset.stimuli) {
        SpikeTrain t;
        t.bits.assign(s.samples.size(), 0);
        trains.push_back({t});
    }
    const MiEstimate estimate = popcode::mi_windowed(dataset, trains, {2, 4, 8}, {0}, 3);
    EXPECT_DOUBLE_EQ(estimate.bits, 0.0);
    for (double v : estimate.per_window_bits) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(MiWindowed, DuplicatedNeuronLeavesPerWindowValuesIdentical) {
    const Dataset dataset = fixtures::uniform_noise_dataset(8, 150, 49);
    std::vector<std::vector<SpikeTrain>> solo, dup;
    for (const auto& s : dataset.stimuli) {
        const SpikeTrain t = popcode::lif_encode(s, {0.8, 0.5});
        solo.push_back({t});
        dup.push_back({t, t});
    }
    const MiEstimate a = popcode::mi_windowed(dataset, solo, {2, 4, 8}, {1}, 3);
    const MiEstimate b = popcode::mi_windowed(dataset, dup, {2, 4, 8}, {1, 1}, 3);
    ASSERT_EQ(a.per_window_bits.size(), b.per_window_bits.size());
    for (std::size_t i = 0; i < a.per_window_bits.size(); ++i) {
        EXPECT_DOUBLE_EQ(a.per_window_bits[i], b.per_window_bits[i]);
    }
    EXPECT_DOUBLE_EQ(a.bits, b.bits);
}

TEST(MiWindowed, MatchesPluginOnQuantizedFixture) {
    // Quantize the staircase amplitudes to 64 levels; with unit windows the
    // two-neuron joint patterns form at most 4 classes, so a full joint
    // histogram is a valid reference.
    Dataset dataset = fixtures::staircase_dataset(30, 256, 8, 50);
    for (auto& s : dataset.stimuli) {
        for (double& v : s.samples) {
            v = std::floor(v * 64.0) / 64.0;
        }
    }
    std::vector<std::vector<SpikeTrain>> trains;
    for (const auto& s : dataset.stimuli) {
        trains.push_back({popcode::lif_encode(s, {0.9, 0.5}),
                          popcode::lif_encode(s, {1.6, 0.5})});
    }
    const PairSet pairs = popcode::extract_pairs(dataset, trains, 1, {0, 0});
    const double knn = popcode::mi_mixed(pairs, 3);

    std::vector<std::uint64_t> xq(pairs.sample_count()), wq(pairs.sample_count());
    for (std::size_t i = 0; i < pairs.sample_count(); ++i) {
        xq[i] = static_cast<std::uint64_t>(std::llround(pairs.amplitudes[i] * 64.0));
        wq[i] = pairs.patterns[i * 2] * 2 + pairs.patterns[i * 2 + 1];
    }
    EXPECT_NEAR(knn, oracles::plugin_mi(xq, wq), 0.1);
}

TEST(MiWindowed, JointPatternsRefineSoloPatterns) {
    // True joint information is at least the solo information; the estimator
    // version holds within tolerance on a large fixture.
    const Dataset dataset = fixtures::uniform_noise_dataset(60, 200, 51);
    std::vector<std::vector<SpikeTrain>> solo, joint;
    for (const auto& s : dataset.stimuli) {
        const SpikeTrain a = popcode::lif_encode(s, {0.7, 0.5});
        const SpikeTrain b = popcode::lif_encode(s, {1.4, 0.5});
        solo.push_back({a});
        joint.push_back({a, b});
    }
    const MiEstimate one = popcode::mi_windowed(dataset, solo, {2, 4, 8}, {0}, 3);
    const MiEstimate two = popcode::mi_windowed(dataset, joint, {2, 4, 8}, {0, 0}, 3);
    ASSERT_GE(one.sample_count, 10000u);
    for (std::size_t i = 0; i < one.per_window_bits.size(); ++i) {
        EXPECT_GE(two.per_window_bits[i], one.per_window_bits[i] - 0.05);
    }
}

TEST(PidTwo, MatchesHandComputedAtoms) {
    const popcode::PidAtoms atoms = popcode::pid_two(3.0, 2.0, 4.0);
    EXPECT_DOUBLE_EQ(atoms.redundant, 2.0);
    EXPECT_DOUBLE_EQ(atoms.unique_1, 1.0);
    EXPECT_DOUBLE_EQ(atoms.unique_2, 0.0);
    EXPECT_DOUBLE_EQ(atoms.synergy, 1.0);
}

TEST(PidTwo, IdenticalNeuronsAreFullyRedundant) {
    const popcode::PidAtoms atoms = popcode::pid_two(1.7, 1.7, 1.7);
    EXPECT_DOUBLE_EQ(atoms.redundant, 1.7);
    EXPECT_DOUBLE_EQ(atoms.unique_1, 0.0);
    EXPECT_DOUBLE_EQ(atoms.unique_2, 0.0);
    EXPECT_DOUBLE_EQ(atoms.synergy, 0.0);
}

TEST(PidTwo, PureSynergyCase) {
    const popcode::PidAtoms atoms = popcode::pid_two(1.0, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(atoms.redundant, 1.0);
    EXPECT_DOUBLE_EQ(atoms.unique_1, 0.0);
    EXPECT_DOUBLE_EQ(atoms.unique_2, 0.0);
    EXPECT_DOUBLE_EQ(atoms.synergy, 1.0);
}

TEST(PidTwo, IdentitiesHoldForRandomTriples) {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 1000; ++trial) {
        const double i1 = popcode::uniform_real(rng) * 8.0;
        const double i2 = popcode::uniform_real(rng) * 8.0;
        const double joint = popcode::uniform_real(rng) * 12.0;
        const popcode::PidAtoms atoms = popcode::pid_two(i1, i2, joint);
        // identities hold aside from the last-ulp re-association error
        EXPECT_NEAR(atoms.unique_1 + atoms.redundant, i1, 1e-12);
        EXPECT_NEAR(atoms.unique_2 + atoms.redundant, i2, 1e-12);
        EXPECT_NEAR(atoms.unique_1 + atoms.unique_2 + atoms.redundant + atoms.synergy,
                    joint, 1e-12);
    }
}

Dataset delayed_detector_signals(std::uint64_t seed, std::size_t stimuli,
                                 std::size_t length) {
    return fixtures::uniform_noise_dataset(stimuli, length, seed);
}

TEST(BestShift, ZeroMaxShiftReturnsUnshiftedEstimate) {
    const Dataset dataset = fixtures::uniform_noise_dataset(10, 100, 53);
    std::vector<SpikeTrain> trains;
    for (const auto& s : dataset.stimuli) trains.push_back(popcode::lif_encode(s, {0.8, 0.5}));
    const auto result = popcode::best_shift(dataset, trains, {2, 3, 4}, 0, 3);
    EXPECT_EQ(result.shift, 0);
    std::vector<std::vector<SpikeTrain>> wrapped;
    for (const auto& t : trains) wrapped.push_back({t});
    const MiEstimate direct = popcode::mi_windowed(dataset, wrapped, {2, 3, 4}, {0}, 3);
    EXPECT_DOUBLE_EQ(result.estimate.bits, direct.bits);
}

TEST(BestShift, FindsConstructedEncodingDelay) {
    // Threshold detector whose output lags the signal by three samples; only
    // windows ending at or after that tap carry information.
    const Dataset dataset = delayed_detector_signals(54, 25, 200);
    std::vector<SpikeTrain> trains;
    for (const auto& s : dataset.stimuli) {
        SpikeTrain t;
        t.bits.assign(s.samples.size(), 0);
        for (std::size_t n = 3; n < s.samples.size(); ++n) {
            t.bits[n] = s.samples[n - 3] >= 0.5 ? 1 : 0;
        }
        trains.push_back(std::move(t));
    }
    const auto result = popcode::best_shift(dataset, trains, {1, 2, 3}, 4, 3);
    EXPECT_EQ(result.shift, 3);
    EXPECT_NEAR(result.estimate.bits, 1.0, 0.1);
}

TEST(BestShift, DegenerateAmplitudeGivesZeroEverywhere) {
    Dataset dataset;
    dataset.stimuli.push_back({"flat", std::vector<double>(150, 0.75), std::nullopt});
    std::vector<SpikeTrain> trains;
    std::mt19937_64 rng(55);
    SpikeTrain t;
    for (int n = 0; n < 150; ++n) t.bits.push_back(rng() & 1);
    trains.push_back(std::move(t));
    const auto result = popcode::best_shift(dataset, trains, {1, 2, 3}, 5, 3);
    EXPECT_EQ(result.shift, 0);
    EXPECT_DOUBLE_EQ(result.estimate.bits, 0.0);
}

}  // namespace
