// Minority and minority-majority terms.
//
//   minority:          m(y,x,x) = m(x,y,x) = m(x,x,y) = y
//   minority-majority: t(y,x,x,z,y,y) = t(x,y,x,y,z,y) = t(x,x,y,y,y,z) = y
//
// An algebra has a minority term iff it has a Maltsev term p and a
// minority-majority term t; then m(x,y,z) = t(x,y,z,p(z,x,y),p(x,y,z),p(y,z,x))
// is one. Existence of a minority term is the subpower membership question
// min(A): over coordinates I = {(a,b,c) : |{a,b,c}| <= 2}, is the minority
// tuple generated by the three projections?

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "malcev/algebra.hpp"
#include "malcev/circuit.hpp"
#include "malcev/smp.hpp"
#include "malcev/subpower.hpp"

namespace malcev {

bool is_minority_table(const OperationTable& table);
bool is_minmaj_table(const OperationTable& table);

/// First failing equation instance, for diagnostics ("m(0,1,0)=3, expected 1").
std::optional<std::string> minority_violation(const OperationTable& table);
std::optional<std::string> minmaj_violation(const OperationTable& table);
std::optional<std::string> maltsev_violation(const OperationTable& table);

/// Raised when compose_minority preconditions fail; names the failing instance.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// m(x,y,z) = t(x,y,z,p(z,x,y),p(x,y,z),p(y,z,x)) on tables.
OperationTable compose_minority(const OperationTable& p, const OperationTable& t);

struct ComposedMinority {
    Circuit circuit;  // over the algebra's basic operations
    OperationTable table;
};

/// Same composition on circuits over `algebra`; the result is inlined.
ComposedMinority compose_minority(const Algebra& algebra, const Circuit& p, const Circuit& t);

/// The six-ary padding t(x1,...,x6) = m(x1,x2,x3).
OperationTable pad_minority(const OperationTable& m);

/// Minority value of a triple with at most two distinct entries.
Element minority_of(Element a, Element b, Element c);

/// min(A). With `idempotent_reduce` the constant triples (a,a,a) are dropped;
/// that requires an idempotent algebra.
SmpInstance build_min_instance(const Algebra& algebra, bool idempotent_reduce);

/// Coordinates {1,2,3} x A^3 ordered by (equation, x, y, z); generator k holds
/// argument k of t in that equation instance, the target holds y.
SmpInstance build_minmaj_instance(const Algebra& algebra);

struct DecisionYes {
    Circuit witness;
};
struct DecisionNo {};
struct DecisionExhausted {
    std::uint64_t elements;
    std::uint64_t applications;
};
using DecisionOutcome = std::variant<DecisionYes, DecisionNo, DecisionExhausted>;

/// Membership of min(A) by closure. Reduction applies only to idempotent
/// algebras and is ignored otherwise. A Yes witness has passed
/// check_minority_witness.
DecisionOutcome decide_minority_bruteforce(const Algebra& algebra, const Budget& budget = {},
                                           bool idempotent_reduce = true);

/// Same for minority-majority terms; a Yes witness is a six-ary circuit
/// whose table has passed is_minmaj_table.
DecisionOutcome decide_minmaj_bruteforce(const Algebra& algebra, const Budget& budget = {});

/// Certificate check: evaluates the ternary circuit everywhere.
bool check_minority_witness(const Algebra& algebra, const Circuit& circuit);

struct SmpunInstance {
    Algebra algebra;
    SmpInstance instance;
    bool fixed_no = false;  // A has no Maltsev term; this is the canonical no-instance
};

/// The canonical unsatisfiable instance: the two-element meet semilattice,
/// generator (0), target (1).
SmpunInstance fixed_no_instance();

/// Reduction to membership over an algebra with a Maltsev basic operation:
/// A plus its Maltsev table, with min(A) (idempotent-reduced), or the fixed
/// no-instance when A has no Maltsev term.
SmpunInstance reduce_to_smpun(const Algebra& algebra, const Budget& budget = {});

} // namespace malcev
