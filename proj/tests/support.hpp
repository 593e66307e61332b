// Small algebras and generators shared by the test suites.

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "malcev/algebra.hpp"

namespace malcev::testing {

inline Algebra affine_cyclic(std::size_t n) {
    return Algebra("Z" + std::to_string(n), n, {make_table("p", n, 3, [n](std::span<const Element> a) {
                       return (a[0] + n - a[1] + a[2]) % n;
                   })});
}

inline Algebra z2_sum() {
    return Algebra("Z2", 2, {make_table("f", 2, 3, [](std::span<const Element> a) { return a[0] ^ a[1] ^ a[2]; })});
}

/// Z2 x Z2 encoded as 0..3 with bitwise xor.
inline Algebra z2_squared() {
    return Algebra("Z2xZ2", 4,
                   {make_table("f", 4, 3, [](std::span<const Element> a) { return a[0] ^ a[1] ^ a[2]; })});
}

inline Algebra lattice2() {
    return Algebra("L2", 2,
                   {OperationTable("meet", 2, 2, {0, 0, 0, 1}), OperationTable("join", 2, 2, {0, 1, 1, 1})});
}

inline OperationTable xor_table(std::size_t n) {
    return make_table("xor", n, 3, [](std::span<const Element> a) { return a[0] ^ a[1] ^ a[2]; });
}

inline OperationTable projection_table(std::size_t n, std::size_t arity, std::size_t which) {
    return make_table("proj", n, arity, [which](std::span<const Element> a) { return a[which]; });
}

/// Random table; the diagonal is forced to be idempotent when asked.
inline OperationTable random_table(std::mt19937_64& rng, std::string name, std::size_t n, std::size_t arity,
                                   bool idempotent) {
    std::uniform_int_distribution<int> pick(0, int(n) - 1);
    return make_table(std::move(name), n, arity, [&](std::span<const Element> a) {
        if (idempotent && std::all_of(a.begin(), a.end(), [&](Element e) { return e == a[0]; })) return int(a[0]);
        return pick(rng);
    });
}

inline Algebra random_algebra(std::mt19937_64& rng, std::size_t n, std::size_t ops, std::size_t max_arity,
                              bool idempotent) {
    std::uniform_int_distribution<std::size_t> arity(1, max_arity);
    std::vector<OperationTable> tables;
    for (std::size_t i = 0; i < ops; ++i) {
        tables.push_back(random_table(rng, "f" + std::to_string(i), n, arity(rng), idempotent));
    }
    return Algebra("R", n, std::move(tables));
}

inline Tuple random_tuple(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_int_distribution<int> pick(0, int(n) - 1);
    Tuple t(d);
    for (auto& e : t) e = static_cast<Element>(pick(rng));
    return t;
}

/// All 2-element algebras with one idempotent ternary operation (64 of them).
inline std::vector<Algebra> idempotent_ternary_corpus2() {
    std::vector<Algebra> all;
    for (unsigned bits = 0; bits < 64; ++bits) {
        std::vector<Element> values(8);
        unsigned k = 0;
        for (unsigned idx = 0; idx < 8; ++idx) {
            if (idx == 0) values[idx] = 0;
            else if (idx == 7) values[idx] = 1;
            else values[idx] = (bits >> k++) & 1;
        }
        all.emplace_back("T" + std::to_string(bits), 2, std::vector{OperationTable("f", 2, 3, values)});
    }
    return all;
}

} // namespace malcev::testing
