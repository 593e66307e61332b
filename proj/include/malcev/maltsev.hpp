// Deciding Maltsev terms of finite idempotent algebras and building circuits
// for them from local witnesses.
//
// Pipeline:
//   1. For every quadruple (a,b,c,d) find a circuit t_{a,b,c,d} with
//      t(a,b,b) = a and t(c,c,d) = d by generating the subalgebra of A^2
//      spanned by (a,c), (b,c), (b,d) until (a,d) shows up. If it never does,
//      A has no Maltsev term.
//   2. For every pair (a,b) chain the local circuits into a two-output circuit
//      computing (t_{a,b}(x,y,z), t_{a,b}(y,y,z)) with t_{a,b}(a,b,b) = a and
//      t_{a,b}(x,x,y) = y.
//   3. Chain the pair circuits into (t(x,y,y), t(x,y,z)) with t Maltsev.
//   4. Inline everything down to the basic operations.
// Pairs of A^2 are enumerated lexicographically: pair k is (k / n, k % n).

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/circuit.hpp"
#include "malcev/subpower.hpp"

namespace malcev {

struct Quadruple {
    Element a, b, c, d;
    auto operator<=>(const Quadruple&) const = default;
};

struct LocalWitness {
    Quadruple quadruple;
    Circuit circuit;  // ternary, single output
};

struct MaltsevFound {
    Circuit circuit;
    std::optional<OperationTable> table;
};

struct NoMaltsev {
    Quadruple witness;  // its local generation closed without reaching (a,d)
};

using MaltsevOutcome = std::variant<MaltsevFound, NoMaltsev>;

struct MaltsevOptions {
    Budget budget{};
    /// Worker threads for the local searches; results are merged in
    /// lexicographic quadruple order, so the output does not depend on it.
    unsigned threads = 1;
    bool compute_table = false;
    /// Sanity bound on the inlined circuit: size <= size_constant * n^6.
    double size_constant = 5.0;
};

/// Symbol names for derived operations in intermediate circuits.
std::string local_symbol(const Quadruple& q);
std::string pair_symbol(Element a, Element b);

/// The k-th pair (a_{k+1}, b_{k+1}) of the lexicographic enumeration of A^2.
std::pair<Element, Element> enumerated_pair(std::size_t n, std::size_t k);

/// Node ids of the two outputs of stage j (0 <= j <= n^2) inside a finished
/// pair circuit: (t^j(x,y,z), t^j(y,y,z)).
std::pair<NodeId, NodeId> pair_stage_nodes(std::size_t j);
/// Node ids of the two outputs of stage j inside a finished global circuit:
/// (t_j(x,y,y), t_j(x,y,z)).
std::pair<NodeId, NodeId> global_stage_nodes(std::size_t j);

/// Step 1 for one quadruple. Requires an idempotent algebra. Returns nullopt
/// when (a,d) is not generated; throws BudgetExhausted if the budget runs out.
std::optional<LocalWitness> local_maltsev(const Algebra& algebra, const Quadruple& q,
                                          const Budget& budget = {});

/// Holds the intermediate circuits of the pipeline so each stage can be
/// inspected.
class MaltsevConstruction {
public:
    explicit MaltsevConstruction(const Algebra& algebra, MaltsevOptions options = {});

    const Algebra& algebra() const { return *algebra_; }
    /// Base operations plus every derived symbol registered so far.
    const Interpretation& interpretation() const { return interpretation_; }

    /// Step 1 over all n^4 quadruples in lexicographic order. Returns the
    /// first quadruple without a local witness, if any.
    std::optional<Quadruple> build_local_witnesses();
    const Circuit& local_witness(const Quadruple& q) const;

    /// Step 2 for one pair: ternary circuit with outputs
    /// (t_{a,b}(x,y,z), t_{a,b}(y,y,z)) and exactly 2n^2 gates.
    Circuit build_pair_circuit(Element a, Element b) const;
    /// Step 2 for all pairs; registers pair symbols for Step 3.
    void build_pair_circuits();
    const Circuit& pair_circuit(Element a, Element b) const;

    /// Step 3: ternary circuit over pair symbols with outputs
    /// (t(x,y,y), t(x,y,z)).
    Circuit build_global_circuit() const;

    /// Step 4: single-output circuit over the basic operations, without dead gates.
    Circuit inline_global(const Circuit& global) const;

private:
    std::size_t quad_index(const Quadruple& q) const;

    const Algebra* algebra_;
    MaltsevOptions options_;
    Interpretation interpretation_;
    std::vector<Circuit> local_;  // lexicographic quadruple order
    std::vector<Circuit> pair_;   // lexicographic pair order
};

/// Full pipeline. Throws AlgebraError for non-idempotent input.
MaltsevOutcome build_maltsev_circuit(const Algebra& algebra, const MaltsevOptions& options = {});

/// Table of the circuit found by the pipeline, named "maltsev".
std::variant<OperationTable, NoMaltsev> maltsev_table(const Algebra& algebra,
                                                      const MaltsevOptions& options = {});

/// p(x,x,y) = y = p(y,x,x) for all x, y.
bool is_maltsev_table(const OperationTable& table);

} // namespace malcev
