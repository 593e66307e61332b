// Subuniverse generation in finite powers A^d with derivation bookkeeping.
//
// Schedule (normative, so derivations are reproducible): elements are numbered
// in discovery order, distinct generators first. Elements are processed one at
// a time in that order. Processing element i applies every operation, in
// declared order, to every argument tuple over elements 0..i that mentions i
// at least once, in lexicographic order of element indices. Results not seen
// before are appended together with the step that produced them. Generation
// stops as soon as the target appears, when every element has been processed
// (the set is closed), or when a budget runs out.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/derivation.hpp"

namespace malcev {

/// A computation that needs a complete closure ran out of budget.
class BudgetExhausted : public AlgebraError {
public:
    using AlgebraError::AlgebraError;
};

struct Budget {
    std::uint64_t max_elements = 1'000'000;
    std::uint64_t max_applications = 100'000'000;
    /// Tuples are kept in memory while the stored bytes stay below this; later
    /// elements are recomputed from their derivation when needed.
    std::uint64_t materialize_bytes = 256ull << 20;
};

enum class GenerationStatus { closed, target_found, exhausted };

class GenerationResult {
public:
    GenerationStatus status() const { return status_; }
    bool exhausted() const { return status_ == GenerationStatus::exhausted; }
    bool closed() const { return status_ == GenerationStatus::closed; }
    std::optional<std::size_t> target_index() const { return target_index_; }

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return derivation_.element_count(); }
    const Derivation& derivation() const { return derivation_; }
    std::uint64_t applications() const { return applications_; }

    /// Element i, recomputed from its derivation if it was not kept in memory.
    Tuple element(std::size_t i) const;
    std::vector<Tuple> elements() const;

private:
    friend class ClosureEngine;
    GenerationResult(const Algebra& algebra, std::size_t dimension)
        : algebra_(algebra), dimension_(dimension) {}

    Algebra algebra_;
    std::size_t dimension_;
    std::vector<Element> stored_;  // elements [0, stored_.size() / dimension_)
    Derivation derivation_;
    std::optional<std::size_t> target_index_;
    GenerationStatus status_ = GenerationStatus::closed;
    std::uint64_t applications_ = 0;
};

/// Closure of `generators` in A^dimension, optionally stopping at `target`.
GenerationResult generate(const Algebra& algebra, std::size_t dimension,
                          std::span<const Tuple> generators, const std::optional<Tuple>& target,
                          const Budget& budget = {});

enum class Membership { yes, no, exhausted };

struct MemberResult {
    Membership answer;
    GenerationResult generation;
};

/// Is `target` in the subpower generated by `generators`? "no" only when the
/// closure completed within budget.
MemberResult member(const Algebra& algebra, std::span<const Tuple> generators, const Tuple& target,
                    const Budget& budget = {});

/// Test oracle: repeated full rescans until nothing new appears. Refuses
/// instances with n^d above `cap`.
std::set<Tuple> naive_fixpoint_oracle(const Algebra& algebra, std::size_t dimension,
                                      std::span<const Tuple> generators, std::uint64_t cap = 1u << 20);

} // namespace malcev
