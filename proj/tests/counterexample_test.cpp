#include <gtest/gtest.h>

#include <set>

#include "malcev/counterexample.hpp"
#include "malcev/maltsev.hpp"
#include "malcev/minority.hpp"

using namespace malcev;

namespace {

Element apply_t(const Algebra& a, std::size_t i, AnElement x, AnElement y, AnElement z) {
    const std::size_t n = a.size() / 4;
    const Element args[3] = {encode_An(n, x), encode_An(n, y), encode_An(n, z)};
    return a.operation(i - 1).at(args);
}

// All tuples of A_n^{3n} with the right first components, filtered by in_R.
std::uint64_t count_R_by_enumeration(std::size_t n) {
    const std::size_t d = 3 * n;
    std::uint64_t count = 0;
    Tuple t(d);
    for (std::uint64_t code = 0; code < (1ull << (2 * d)); ++code) {
        for (std::size_t j = 0; j < d; ++j) t[j] = static_cast<Element>(4 * (j % n) + (code >> (2 * j) & 3));
        count += in_R(n, t);
    }
    return count;
}

} // namespace

TEST(AnCodec, RoundTrips) {
    for (std::size_t n : {3, 5, 64}) {
        for (unsigned e = 0; e < 4 * n; ++e) EXPECT_EQ(encode_An(n, decode_An(n, Element(e))), e);
    }
    EXPECT_EQ(encode_An(3, {2, 3}), 7);
    EXPECT_EQ(decode_An(3, 8), (AnElement{3, 0}));
    EXPECT_THROW(encode_An(3, {0, 1}), AlgebraError);
    EXPECT_THROW(encode_An(3, {4, 1}), AlgebraError);
    EXPECT_THROW(encode_An(3, {1, 4}), AlgebraError);
    EXPECT_THROW(decode_An(3, 12), AlgebraError);
}

TEST(RangeMinority, Cases) {
    // 1-based m(1,2,2) = 1, m(1,2,1) = 2, m(1,2,3) = 3, shifted to 0-based.
    const auto m = minority_on_range(3);
    const Element yz[3] = {0, 1, 1}, xz[3] = {0, 1, 0}, other[3] = {0, 1, 2};
    EXPECT_EQ(m.at(yz), 0);
    EXPECT_EQ(m.at(xz), 1);
    EXPECT_EQ(m.at(other), 2);
    EXPECT_TRUE(is_minority_table(m));
}

TEST(BuildAn, Examples) {
    const Algebra a3 = build_An(3);
    EXPECT_EQ(a3.size(), 12u);
    EXPECT_EQ(a3.name(), "A3");
    ASSERT_EQ(a3.operation_count(), 3u);
    EXPECT_EQ(a3.operation(2).name(), "t3");
    EXPECT_TRUE(a3.idempotent());
    EXPECT_EQ(decode_An(3, apply_t(a3, 1, {1, 0}, {1, 1}, {1, 3})), (AnElement{1, 2}));
    EXPECT_EQ(decode_An(3, apply_t(a3, 1, {1, 0}, {2, 1}, {1, 3})), (AnElement{2, 2}));
    EXPECT_EQ(decode_An(3, apply_t(a3, 1, {1, 0}, {1, 1}, {1, 0})), (AnElement{1, 3}));
    EXPECT_FALSE(is_minority_table(a3.operation(0)));
    EXPECT_THROW(build_An(2), AlgebraError);
    EXPECT_THROW(build_An(65), AlgebraError);
}

TEST(BuildAn, EveryOperationIsMaltsev) {
    for (std::size_t n : {3, 4, 5}) {
        const Algebra a = build_An(n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(is_maltsev_table(a.operation(i))) << n << " t" << i + 1;
    }
}

TEST(Observation, Exhaustive) {
    EXPECT_TRUE(verify_observation());
    const auto r = observation_report();
    EXPECT_EQ(r.checked, 64u);
    EXPECT_EQ(r.failures, 0u);
    EXPECT_EQ(r.verdict(), "pass");
}

TEST(LocalMinority, ExhaustiveSmallCases) {
    const auto r3 = verify_local_minority(3);
    EXPECT_EQ(r3.checked, 66u);
    EXPECT_TRUE(r3.pass);
    EXPECT_FALSE(r3.heuristic);
    const auto r4 = verify_local_minority(4);
    EXPECT_EQ(r4.checked, 560u);
    EXPECT_TRUE(r4.pass);
}

TEST(LocalMinority, LargerCases) {
    // C(20,4) = 4845 fits under the cap; C(28,6) does not and is sampled.
    const auto r5 = verify_local_minority(5, 10'000, 7);
    EXPECT_EQ(r5.checked, 4845u);
    EXPECT_TRUE(r5.pass);
    const auto r7 = verify_local_minority(7, 10'000, 7);
    EXPECT_EQ(r7.checked, 10'000u);
    EXPECT_TRUE(r7.pass);
    ASSERT_FALSE(r7.notes.empty());
    EXPECT_NE(r7.notes[0].find("sampled"), std::string::npos);
}

TEST(LocalMinority, FullUniverseFails) {
    // On all of A_n no t_i is a minority, so the local check really depends
    // on leaving one first component out.
    const Algebra a3 = build_An(3);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(minority_violation(a3.operation(i)));
}

TEST(RelationR, Examples) {
    const auto w = witness_tuples(3);
    EXPECT_TRUE(in_R(3, w.v1));
    EXPECT_TRUE(in_R(3, w.v2));
    EXPECT_TRUE(in_R(3, w.v3));
    EXPECT_FALSE(in_R(3, w.v0));
    for (std::size_t j = 0; j < 9; ++j) {
        EXPECT_EQ(decode_An(3, w.v1[j]).b, j < 3 ? 0u : 1u);
        EXPECT_EQ(minority_of(w.v1[j], w.v2[j], w.v3[j]), w.v0[j]);
    }
    Tuple mixed = w.v1;
    mixed[0] = encode_An(3, {1, 1});
    mixed[3] = encode_An(3, {1, 0});  // wrong first component as well
    EXPECT_FALSE(in_R(3, mixed));
    Tuple parity = w.v1;
    parity[1] = encode_An(3, {2, 1});  // mixes parities within block 0
    parity[2] = encode_An(3, {3, 1});
    EXPECT_FALSE(in_R(3, parity));
    EXPECT_FALSE(in_R(3, Tuple(8, 0)));
}

TEST(RelationR, SizeMatchesEnumeration) {
    EXPECT_EQ(count_R_by_enumeration(3), 1024u);
    EXPECT_EQ(R_size(3), 1024u);
    EXPECT_EQ(R_size(4), count_R_by_enumeration(4));
    EXPECT_THROW(R_size(22), AlgebraError);
}

TEST(RSampler, DrawsMembersAtTheExpectedRate) {
    for (std::size_t n : {3, 4, 5}) {
        RSampler s(n, 99);
        for (int k = 0; k < 40'000; ++k) ASSERT_TRUE(in_R(n, s.draw()));
        const double rate = double(s.accepted()) / double(s.attempts());
        EXPECT_NEAR(rate, n % 2 ? 0.25 : 0.5, 0.01) << n;
    }
    RSampler a(3, 5), b(3, 5);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(a.draw(), b.draw());
}

TEST(RSampler, CoversAllOfRForSmallN) {
    RSampler s(3, 1);
    std::set<Tuple> seen;
    for (int k = 0; k < 30'000; ++k) seen.insert(s.draw());
    EXPECT_EQ(seen.size(), R_size(3));
}

TEST(RPreservation, WitnessTriple) {
    const Algebra a3 = build_An(3);
    const auto w = witness_tuples(3);
    const std::vector<Tuple> triple = {w.v1, w.v2, w.v3};
    for (std::size_t op = 0; op < 3; ++op) EXPECT_TRUE(in_R(3, apply_pointwise(a3, op, triple)));
}

TEST(RPreservation, SampledOddAndEven) {
    const auto r3 = verify_R_preservation(3, 100'000);
    EXPECT_TRUE(r3.pass);
    EXPECT_FALSE(r3.heuristic);
    EXPECT_EQ(r3.checked, 300'000u);
    EXPECT_EQ(r3.verdict(), "pass");
    // For even n the relation R from the odd-n argument is not a subuniverse
    // (see EvenNBreaksR), so the sampled run must find failures.
    const auto r4 = verify_R_preservation(4, 100'000);
    EXPECT_TRUE(r4.heuristic);
    EXPECT_FALSE(r4.pass);
    EXPECT_GT(r4.failures, 0u);
    EXPECT_TRUE(r4.counterexample);
    EXPECT_EQ(r4.verdict(), "fail");
}

TEST(RPreservation, EvenNBreaksR) {
    // Only block 0 carries parities (0,1,0), where xor and x - y + z differ by
    // 2 on each of the n - 1 coordinates handled by xor. With n = 4 that
    // shifts the sum by 6 = 2 mod 4, so the image leaves R.
    const std::size_t n = 4;
    const Algebra a4 = build_An(n);
    auto tuple = [&](std::vector<unsigned> arith) {
        Tuple t(3 * n);
        for (std::size_t j = 0; j < 3 * n; ++j) t[j] = encode_An(n, {j % n + 1, arith[j]});
        return t;
    };
    const Tuple a = tuple({2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    const Tuple b = tuple({1, 1, 1, 1, 2, 0, 0, 0, 0, 0, 0, 0});
    ASSERT_TRUE(in_R(n, a));
    ASSERT_TRUE(in_R(n, b));
    const std::vector<Tuple> triple = {a, b, a};
    EXPECT_FALSE(in_R(n, apply_pointwise(a4, 0, triple)));
    // For odd n an odd block has an odd sum, so members of R have an even
    // number of odd blocks and the shifts cancel: here 4 * (2 + 2) = 0 mod 4.
    const Algebra a5 = build_An(5);
    auto tuple5 = [&](std::vector<unsigned> arith) {
        Tuple t(15);
        for (std::size_t j = 0; j < 15; ++j) t[j] = encode_An(5, {j % 5 + 1, arith[j]});
        return t;
    };
    const Tuple a_ = tuple5({2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    const Tuple b_ = tuple5({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
    ASSERT_TRUE(in_R(5, a_));
    ASSERT_TRUE(in_R(5, b_));
    const std::vector<Tuple> triple5 = {a_, b_, a_};
    EXPECT_TRUE(in_R(5, apply_pointwise(a5, 0, triple5)));
}

TEST(RPreservation, ThreadCountDoesNotMatter) {
    const auto one = verify_R_preservation(3, 200'000, 3, 1);
    const auto four = verify_R_preservation(3, 200'000, 3, 4);
    EXPECT_EQ(one.checked, four.checked);
    EXPECT_EQ(one.notes, four.notes);
}

TEST(NoMinorityEvidence, OddAndEven) {
    Budget b;
    b.max_elements = 100'000;
    const auto r3 = verify_no_minority_evidence(3, b);
    EXPECT_TRUE(r3.pass) << r3.counterexample.value_or("");
    EXPECT_GT(r3.checked, 3u);
    EXPECT_LE(r3.checked, 1024u);
    // For even n the closure escapes R, which the report must say.
    Budget small;
    small.max_elements = 5'000;
    const auto r4 = verify_no_minority_evidence(4, small);
    EXPECT_TRUE(r4.heuristic);
    EXPECT_FALSE(r4.pass);
}

TEST(CrossModule, A3HasMaltsevButNoMinority) {
    EXPECT_TRUE(std::holds_alternative<MaltsevFound>(build_maltsev_circuit(build_An(3))));
    Budget b;
    b.max_elements = 5'000;
    b.max_applications = 2'000'000;
    EXPECT_FALSE(std::holds_alternative<DecisionYes>(decide_minority_bruteforce(build_An(3), b)));
}
