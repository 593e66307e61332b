// The algebras A_n on [n] x [4] with ternary operations t_1..t_n:
//
//   t_i((a1,b1),(a2,b2),(a3,b3)) = (i, b1 - b2 + b3)                if a1 = a2 = a3 = i
//                                = (m(a1,a2,a3), b1 xor b2 xor b3)  otherwise
//
// where m is the minority-or-third operation on [n]. Every (n-1)-element
// subset has a local minority term, yet for odd n there is no minority term:
// the relation R below is a subuniverse of A_n^{3n} containing v1, v2, v3 but
// not their coordinatewise minority v0.
//
// Element (i,b) with i in [1..n], b in [0..3] is encoded as 4(i-1) + b.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/subpower.hpp"

namespace malcev {

struct AnElement {
    std::size_t i;  // 1..n
    unsigned b;     // 0..3
    bool operator==(const AnElement&) const = default;
};

Element encode_An(std::size_t n, AnElement e);
AnElement decode_An(std::size_t n, Element e);

/// m(x,y,z) = x if y = z, y if x = z, z otherwise, on [n] (0-based here).
OperationTable minority_on_range(std::size_t n);

/// Requires n > 2. Operations are named t1..tn; the algebra is named A<n>.
Algebra build_An(std::size_t n);

struct VerificationReport {
    std::string name;
    bool pass = true;
    bool heuristic = false;  // no proof backs the checked statement
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    std::optional<std::string> counterexample{};  // first failure
    std::vector<std::string> notes{};

    /// "pass", "fail" or "heuristic-pass".
    std::string verdict() const;
};

/// (x xor y xor z) - (x - y + z) mod 4 lies in {0,2} and depends only on the
/// parities of x, y, z. Exhaustive over [0..3]^3.
bool verify_observation();
VerificationReport observation_report();

/// For each (n-1)-subset E of A_n: t_i with i missing from E's first
/// coordinates satisfies the minority equations on E. Exhaustive when
/// C(4n, n-1) <= subset_cap, otherwise subset_cap uniformly sampled subsets.
VerificationReport verify_local_minority(std::size_t n, std::uint64_t subset_cap = 1'000'000,
                                         std::uint64_t seed = 1);

/// Membership in R: coordinate j must have first component (j mod n) + 1,
/// parities constant on each block of n, arithmetic sum = 2 mod 4.
bool in_R(std::size_t n, const Tuple& t);

/// |R| = (#admissible block parities) * 2^(3n-1).
std::uint64_t R_size(std::size_t n);

struct WitnessTuples {
    Tuple v1, v2, v3, v0;
};
/// Arithmetic blocks v1 = (0,1,1), v2 = (1,0,1), v3 = (1,1,0), v0 = (0,0,0).
WitnessTuples witness_tuples(std::size_t n);

/// Draws members of R: block parities and high bits uniformly, then accepts
/// iff the sum is 2 mod 4. Acceptance is 1/4 for odd n, 1/2 for even n.
class RSampler {
public:
    RSampler(std::size_t n, std::uint64_t seed);
    Tuple draw();
    std::uint64_t attempts() const { return attempts_; }
    std::uint64_t accepted() const { return accepted_; }

private:
    std::size_t n_;
    std::mt19937_64 rng_;
    std::uint64_t attempts_ = 0;
    std::uint64_t accepted_ = 0;
};

/// Applies every t_i to `samples` sampled triples from R and checks the
/// results stay in R. Even n is labeled heuristic. Work is split in fixed
/// chunks with their own seeds, so the result does not depend on `threads`.
VerificationReport verify_R_preservation(std::size_t n, std::uint64_t samples, std::uint64_t seed = 1,
                                         unsigned threads = 1);

/// Generates from {v1,v2,v3} toward v0 under `budget` and checks that every
/// generated element lies in R, v0 is never reached, v0 is outside R and v0 is
/// the coordinatewise minority of (v1,v2,v3).
VerificationReport verify_no_minority_evidence(std::size_t n, const Budget& budget = {});

} // namespace malcev
