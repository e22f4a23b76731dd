#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "popcode/patterns.hpp"

namespace {

using popcode::Dataset;
using popcode::PairSet;
using popcode::SpikeTrain;
using popcode::Stimulus;

SpikeTrain train_of(std::initializer_list<int> bits) {
    SpikeTrain t;
    for (int b : bits) t.bits.push_back(static_cast<std::uint8_t>(b));
    return t;
}

Dataset one_stimulus(std::size_t length) {
    Dataset d;
    Stimulus s;
    s.label = "x";
    for (std::size_t i = 0; i < length; ++i) s.samples.push_back(static_cast<double>(i));
    d.stimuli.push_back(std::move(s));
    return d;
}

TEST(ExtractPairs, PacksWindowsWithMostRecentBitLow) {
    const Dataset dataset = one_stimulus(3);
    const std::vector<std::vector<SpikeTrain>> trains = {{train_of({1, 0, 1})}};
    const PairSet pairs = popcode::extract_pairs(dataset, trains, 2, {0});
    ASSERT_EQ(pairs.sample_count(), 2u);
    EXPECT_DOUBLE_EQ(pairs.amplitudes[0], 1.0);  // emitted at n = 1 and n = 2
    EXPECT_DOUBLE_EQ(pairs.amplitudes[1], 2.0);
    EXPECT_EQ(pairs.patterns[0], 2u);  // bits "10"
    EXPECT_EQ(pairs.patterns[1], 1u);  // bits "01"
}

TEST(ExtractPairs, UnitWindowIsTheBitItself) {
    const Dataset dataset = one_stimulus(5);
    const SpikeTrain t = train_of({0, 1, 1, 0, 1});
    const PairSet pairs = popcode::extract_pairs(dataset, {{t}}, 1, {0});
    ASSERT_EQ(pairs.sample_count(), 5u);
    for (std::size_t n = 0; n < 5; ++n) {
        EXPECT_EQ(pairs.patterns[n], t.bits[n]);
    }
}

TEST(ExtractPairs, IdenticalNeuronsGiveIdenticalColumns) {
    const Dataset dataset = one_stimulus(8);
    const SpikeTrain t = train_of({0, 1, 0, 0, 1, 1, 0, 1});
    const PairSet pairs = popcode::extract_pairs(dataset, {{t, t}}, 3, {0, 0});
    ASSERT_EQ(pairs.neuron_count, 2u);
    for (std::size_t i = 0; i < pairs.sample_count(); ++i) {
        EXPECT_EQ(pairs.patterns[i * 2], pairs.patterns[i * 2 + 1]);
    }
}

TEST(PackWindow, RoundTripsThroughUnpack) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int window = 1 + static_cast<int>(rng() % 32);
        SpikeTrain t;
        for (int i = 0; i < window; ++i) t.bits.push_back(rng() & 1);
        const std::uint64_t symbol =
            popcode::pack_window(t, static_cast<std::size_t>(window - 1), window);
        EXPECT_EQ(popcode::unpack_window(symbol, window), t.bits);
    }
}

TEST(ExtractPairs, SampleCountMatchesClosedFormAndEnumeration) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t length = 20 + rng() % 200;
        const int window = 1 + static_cast<int>(rng() % 12);
        const std::size_t stride = 1 + rng() % 5;
        const std::vector<int> shifts = {static_cast<int>(rng() % 6),
                                         static_cast<int>(rng() % 6)};
        const int max_shift = std::max(shifts[0], shifts[1]);
        if (length < static_cast<std::size_t>(window + max_shift)) continue;

        Dataset dataset = one_stimulus(length);
        SpikeTrain t;
        for (std::size_t i = 0; i < length; ++i) t.bits.push_back(rng() & 1);
        const PairSet pairs = popcode::extract_pairs(dataset, {{t, t}}, window, shifts, stride);

        const std::size_t closed_form =
            (length - static_cast<std::size_t>(window) - static_cast<std::size_t>(max_shift)) /
                stride +
            1;
        EXPECT_EQ(pairs.sample_count(), closed_form);
        EXPECT_EQ(pairs.sample_count(),
                  oracles::enumerate_windows(length, window, shifts, stride));

        const PairSet again = popcode::extract_pairs(dataset, {{t, t}}, window, shifts, stride);
        EXPECT_EQ(pairs.amplitudes, again.amplitudes);
        EXPECT_EQ(pairs.patterns, again.patterns);
    }
}

TEST(ExtractPairs, JointPatternsMarginalizeToSoloPatterns) {
    const Dataset dataset = fixtures::uniform_noise_dataset(3, 64, 33);
    std::vector<std::vector<SpikeTrain>> joint(3), solo0(3), solo1(3);
    std::mt19937_64 rng(34);
    for (std::size_t i = 0; i < 3; ++i) {
        SpikeTrain a, b;
        for (int n = 0; n < 64; ++n) {
            a.bits.push_back(rng() & 1);
            b.bits.push_back(rng() & 1);
        }
        joint[i] = {a, b};
        solo0[i] = {a};
        solo1[i] = {b};
    }
    const std::vector<int> shifts = {1, 3};
    const PairSet pairs = popcode::extract_pairs(dataset, joint, 4, shifts);
    const PairSet p0 = popcode::extract_pairs(dataset, solo0, 4, {shifts[0]});
    const PairSet p1 = popcode::extract_pairs(dataset, solo1, 4, {shifts[1]});
    // Joint extraction trims indices by the larger shift, so compare against
    // the common prefix structure via amplitudes.
    std::size_t j0 = 0, j1 = 0;
    for (std::size_t i = 0; i < pairs.sample_count(); ++i) {
        while (p0.amplitudes[j0] != pairs.amplitudes[i]) ++j0;
        while (p1.amplitudes[j1] != pairs.amplitudes[i]) ++j1;
        EXPECT_EQ(pairs.patterns[i * 2 + 0], p0.patterns[j0]);
        EXPECT_EQ(pairs.patterns[i * 2 + 1], p1.patterns[j1]);
    }
}

TEST(ExtractPairs, CapIncreasesStrideUniformly) {
    const Dataset dataset = fixtures::uniform_noise_dataset(4, 5000, 35);
    std::vector<std::vector<SpikeTrain>> trains;
    std::mt19937_64 rng(36);
    for (std::size_t i = 0; i < 4; ++i) {
        SpikeTrain t;
        for (int n = 0; n < 5000; ++n) t.bits.push_back(rng() & 1);
        trains.push_back({t});
    }
    const PairSet pairs = popcode::extract_pairs(dataset, trains, 2, {0}, 1, 1000);
    EXPECT_LE(pairs.sample_count(), 1000u);
    EXPECT_GT(pairs.stride, 1u);
    // smallest stride obeying the cap
    std::size_t at_previous = 0;
    for (const auto& s : dataset.stimuli) {
        at_previous += (s.samples.size() - 2) / (pairs.stride - 1) + 1;
    }
    EXPECT_GT(at_previous, 1000u);
}

TEST(ExtractPairs, RejectsShortTrains) {
    const Dataset dataset = one_stimulus(4);
    const SpikeTrain t = train_of({1, 0, 1, 0});
    EXPECT_THROW(popcode::extract_pairs(dataset, {{t}}, 5, {0}), std::invalid_argument);
    EXPECT_THROW(popcode::extract_pairs(dataset, {{t}}, 3, {2}), std::invalid_argument);
}

TEST(ExtractPairs, RejectsBadWindowAndShiftArguments) {
    const Dataset dataset = one_stimulus(4);
    const SpikeTrain t = train_of({1, 0, 1, 0});
    EXPECT_THROW(popcode::extract_pairs(dataset, {{t}}, 0, {0}), std::invalid_argument);
    EXPECT_THROW(popcode::extract_pairs(dataset, {{t}}, 64, {0}), std::invalid_argument);
    EXPECT_THROW(popcode::extract_pairs(dataset, {{t}}, 2, {-1}), std::invalid_argument);
    EXPECT_THROW(popcode::extract_pairs(dataset, {{t}}, 2, {0}, 0), std::invalid_argument);
}

}  // namespace
