#include <gtest/gtest.h>

#include "malcev/algebra.hpp"
#include "malcev/counterexample.hpp"
#include "support.hpp"

using namespace malcev;
using namespace malcev::testing;

TEST(ParseAlgebra, TernarySumOnTwoElements) {
    const Algebra a = parse_algebra(R"(# parity
algebra Z2
size 2
op f 3
0 1 1 0
1 0 0 1
)");
    EXPECT_EQ(a.name(), "Z2");
    EXPECT_EQ(a.size(), 2u);
    ASSERT_EQ(a.operation_count(), 1u);
    EXPECT_EQ(a.operation(0).arity(), 3u);
    for (Element x = 0; x < 2; ++x)
        for (Element y = 0; y < 2; ++y)
            for (Element z = 0; z < 2; ++z) {
                const Element args[3] = {x, y, z};
                EXPECT_EQ(a.operation(0).at(args), (x + y + z) % 2);
            }
    EXPECT_TRUE(a.idempotent());
}

TEST(ParseAlgebra, SingleElementUnary) {
    const Algebra a = parse_algebra("algebra one\nsize 1\nop id 1\n0\n");
    EXPECT_EQ(a.size(), 1u);
    EXPECT_EQ(a.operation(0).values().size(), 1u);
    EXPECT_TRUE(a.idempotent());
}

TEST(ParseAlgebra, RejectsNullaryOperation) {
    EXPECT_THROW(parse_algebra("algebra c\nsize 2\nop c 0\n1\n"), AlgebraError);
}

TEST(ParseAlgebra, RejectsMalformedInput) {
    EXPECT_THROW(parse_algebra("algebra e\nsize 2\n"), AlgebraError);                  // no operations
    EXPECT_THROW(parse_algebra("algebra e\nsize 2\nop f 1\n0\n"), AlgebraError);       // short table
    EXPECT_THROW(parse_algebra("algebra e\nsize 2\nop f 1\n0 1 1\n"), AlgebraError);   // long table
    EXPECT_THROW(parse_algebra("algebra e\nsize 2\nop f 1\n0 2\n"), AlgebraError);     // out of range
    EXPECT_THROW(parse_algebra("algebra e\nsize 0\nop f 1\n\n"), AlgebraError);        // empty universe
    EXPECT_THROW(parse_algebra("algebra e\nop f 1\n0 1\n"), AlgebraError);             // missing size
    EXPECT_THROW(parse_algebra("algebra e\nsize 2\nop f 1\n0 x\n"), AlgebraError);     // not a number
    EXPECT_THROW(parse_algebra("algebra e\nsize 2\nop f 1\n0 1\nop f 1\n0 1\n"), AlgebraError);  // duplicate
}

TEST(ParseAlgebra, ErrorsNameTheLine) {
    try {
        parse_algebra("algebra e\nsize 2\nop f 1\n0\n7\n");
        FAIL();
    } catch (const AlgebraError& e) {
        EXPECT_NE(std::string(e.what()).find("5"), std::string::npos) << e.what();
    }
}

TEST(Apply, Examples) {
    const Algebra z4 = affine_cyclic(4);
    const Element a[3] = {1, 2, 3};
    EXPECT_EQ(apply(z4, 0, a), 2);
    const Element b[3] = {1, 1, 0};
    EXPECT_EQ(apply(z2_sum(), 0, b), 0);
    for (Element x = 0; x < 4; ++x) {
        const Element c[3] = {x, x, x};
        EXPECT_EQ(apply(z4, 0, c), x);
    }
}

TEST(Apply, Errors) {
    const Algebra z4 = affine_cyclic(4);
    const Element two[2] = {0, 1};
    const Element big[3] = {0, 1, 4};
    EXPECT_THROW(apply(z4, 0, two), AlgebraError);
    EXPECT_THROW(apply(z4, 0, big), AlgebraError);
    EXPECT_THROW(apply(z4, 1, two), AlgebraError);
}

TEST(ApplyPointwise, Examples) {
    const std::vector<Tuple> args = {{0, 0}, {1, 1}, {1, 0}};
    EXPECT_EQ(apply_pointwise(z2_sum(), 0, args), (Tuple{0, 1}));
    const Algebra z4 = affine_cyclic(4);
    const Tuple t = {3, 1, 2, 0};
    const std::vector<Tuple> same = {t, t, t};
    EXPECT_EQ(apply_pointwise(z4, 0, same), t);
}

TEST(ApplyPointwise, DimensionMismatch) {
    const std::vector<Tuple> args = {{0, 0}, {1}, {1, 0}};
    EXPECT_THROW(apply_pointwise(z2_sum(), 0, args), AlgebraError);
}

TEST(ApplyPointwise, CommutesWithProjection) {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 1 + rng() % 5;
        const Algebra a = random_algebra(rng, n, 1 + rng() % 3, 3, false);
        const std::size_t op = rng() % a.operation_count();
        const std::size_t d = 1 + rng() % 6;
        std::vector<Tuple> args;
        for (std::size_t i = 0; i < a.operation(op).arity(); ++i) args.push_back(random_tuple(rng, n, d));
        const Tuple out = apply_pointwise(a, op, args);
        for (std::size_t j = 0; j < d; ++j) {
            Tuple column;
            for (const auto& t : args) column.push_back(t[j]);
            EXPECT_EQ(out[j], apply(a, op, column));
        }
    }
}

TEST(Idempotence, Examples) {
    EXPECT_TRUE(is_idempotent(z2_sum()));
    const Algebra plus("Z4+", 4, {make_table("add", 4, 2, [](std::span<const Element> a) { return (a[0] + a[1]) % 4; })});
    EXPECT_FALSE(is_idempotent(plus));
    EXPECT_FALSE(plus.idempotent());
    for (std::size_t n : {3, 4, 5}) EXPECT_TRUE(is_idempotent(build_An(n)));
}

TEST(SizeNorm, Examples) {
    EXPECT_EQ(size_norm(z2_sum()), 8u);
    EXPECT_EQ(size_norm(build_An(3)), 5184u);
    const Algebra mixed("M", 3, {make_table("u", 3, 1, [](std::span<const Element> a) { return a[0]; }),
                                 make_table("b", 3, 2, [](std::span<const Element> a) { return a[1]; })});
    EXPECT_EQ(size_norm(mixed), 12u);
}

TEST(Algebra, ConstructionChecks) {
    EXPECT_THROW(Algebra("e", 2, {}), AlgebraError);
    EXPECT_THROW(Algebra("e", 0, {projection_table(1, 1, 0)}), AlgebraError);
    EXPECT_THROW(Algebra("e", 3, {projection_table(2, 1, 0)}), AlgebraError);
    EXPECT_THROW(OperationTable("f", 2, 0, {0}), AlgebraError);
    EXPECT_THROW(OperationTable("f", 2, 1, {0, 2}), AlgebraError);
    EXPECT_THROW(OperationTable("f", 2, 2, {0, 1, 1}), AlgebraError);
}

TEST(Algebra, FindAndExtend) {
    const Algebra l = lattice2();
    EXPECT_EQ(l.find_operation("join"), 1u);
    EXPECT_EQ(l.find_operation("nope"), l.operation_count());
    const Algebra ext = l.with_operation(xor_table(2));
    EXPECT_EQ(ext.operation_count(), 3u);
    EXPECT_EQ(ext.operation(2).name(), "xor");
    EXPECT_THROW(l.with_operation(OperationTable("meet", 2, 1, {0, 1})), AlgebraError);
}

TEST(Algebra, CheckedPower) {
    EXPECT_EQ(checked_power(4, 32 - 1), 1ull << 62);
    EXPECT_THROW(checked_power(4, 32), AlgebraError);
    EXPECT_EQ(checked_power(256, 0), 1u);
}

TEST(Serialization, RoundTripsRandomAlgebras) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 50; ++round) {
        const Algebra a = random_algebra(rng, 1 + rng() % 6, 1 + rng() % 3, 3, rng() % 2);
        const Algebra b = parse_algebra(serialize_algebra(a));
        EXPECT_EQ(a, b);
        EXPECT_EQ(a.idempotent(), b.idempotent());
        EXPECT_GE(size_norm(b), b.size());
    }
    const Algebra a3 = build_An(3);
    EXPECT_EQ(parse_algebra(serialize_algebra(a3)), a3);
}

TEST(Serialization, Files) {
    const std::string path = ::testing::TempDir() + "algebra_roundtrip.alg";
    save_algebra(lattice2(), path);
    EXPECT_EQ(load_algebra(path), lattice2());
    EXPECT_THROW(load_algebra(::testing::TempDir() + "does/not/exist.alg"), AlgebraError);
}
