// Term circuits: multi-output DAGs whose gates are labeled by operation symbols.
//
// Nodes are numbered inputs first (0..k-1), then gates in the order they were
// added. A gate may only reference nodes with a smaller number, so every
// Circuit is acyclic and its gate order is a topological order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/derivation.hpp"

namespace malcev {

using NodeId = std::uint32_t;

class CircuitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Symbol {
    std::string name;
    std::size_t arity;
    bool operator==(const Symbol&) const = default;
};

class Circuit {
public:
    const std::string& name() const { return name_; }
    std::size_t input_count() const { return inputs_; }
    std::size_t gate_count() const { return gate_symbol_.size(); }
    /// Number of vertices: inputs plus gates.
    std::size_t size() const { return inputs_ + gate_count(); }

    const std::vector<Symbol>& symbols() const { return symbols_; }
    std::size_t gate_symbol(std::size_t gate) const { return gate_symbol_[gate]; }
    std::span<const NodeId> gate_args(std::size_t gate) const {
        return std::span<const NodeId>(args_).subspan(arg_offset_[gate],
                                                      arg_offset_[gate + 1] - arg_offset_[gate]);
    }
    std::span<const NodeId> outputs() const { return outputs_; }

    bool is_input(NodeId node) const { return node < inputs_; }
    NodeId gate_node(std::size_t gate) const { return static_cast<NodeId>(inputs_ + gate); }

    /// Same gates, different outputs.
    Circuit with_outputs(std::vector<NodeId> outputs) const;
    Circuit renamed(std::string name) const;

    /// Structural equality; symbol interning order is irrelevant.
    bool operator==(const Circuit& other) const;

private:
    friend class CircuitBuilder;
    Circuit() = default;

    std::string name_;
    std::size_t inputs_ = 0;
    std::vector<Symbol> symbols_;
    std::vector<std::uint32_t> gate_symbol_;
    std::vector<std::size_t> arg_offset_{0};
    std::vector<NodeId> args_;
    std::vector<NodeId> outputs_;
};

/// Appends gates in topological order. Forward references are rejected.
class CircuitBuilder {
public:
    CircuitBuilder(std::string name, std::size_t inputs);

    NodeId input(std::size_t i) const;
    std::size_t node_count() const { return circuit_.size(); }

    NodeId add_gate(std::string_view symbol, std::span<const NodeId> args);
    NodeId add_gate(std::string_view symbol, std::initializer_list<NodeId> args) {
        return add_gate(symbol, std::span<const NodeId>(args.begin(), args.size()));
    }

    /// Snapshot of the gates added so far with the given outputs.
    Circuit build(std::vector<NodeId> outputs) const;

private:
    std::uint32_t intern(std::string_view symbol, std::size_t arity);

    Circuit circuit_;
    std::unordered_map<std::string, std::uint32_t> symbol_index_;
};

/// Maps symbol names to tables: basic operations of an algebra plus derived
/// symbols defined by single-output circuits. A derived symbol is evaluated
/// through its defining circuit; the resulting table is memoized on first use.
/// Not safe for concurrent use while derived tables are still being filled.
class Interpretation {
public:
    explicit Interpretation(const Algebra& algebra, std::uint64_t table_budget = 1ull << 26);

    const Algebra& algebra() const { return *algebra_; }

    /// Registers a derived symbol. Its arity is the definition's input count.
    void define(std::string name, Circuit definition);
    bool defines(std::string_view name) const;

    /// Table for `symbol`, checking that its arity matches.
    const OperationTable& table(std::string_view symbol, std::size_t arity) const;

private:
    const Algebra* algebra_;
    std::uint64_t table_budget_;
    std::map<std::string, Circuit, std::less<>> definitions_;
    mutable std::map<std::string, std::unique_ptr<OperationTable>, std::less<>> derived_tables_;
    mutable std::vector<std::string> in_progress_;
};

/// Evaluates one circuit repeatedly in a single topological pass per input.
class Evaluator {
public:
    Evaluator(const Circuit& circuit, const Algebra& algebra);
    Evaluator(const Circuit& circuit, const Interpretation& interpretation);

    /// Values of the outputs on `input`.
    Tuple operator()(std::span<const Element> input);
    /// Values of every node from the last call, indexed by NodeId.
    std::span<const Element> node_values() const { return values_; }
    Element output_value(std::size_t output) const { return values_[circuit_->outputs()[output]]; }

    std::uint64_t gate_visits() const { return gate_visits_; }

private:
    void bind(const Interpretation& interpretation);
    void run(std::span<const Element> input);

    const Circuit* circuit_;
    std::size_t universe_ = 0;
    std::vector<const OperationTable*> bound_;
    std::vector<Element> values_;
    std::uint64_t gate_visits_ = 0;
};

Tuple evaluate(const Circuit& circuit, const Algebra& algebra, std::span<const Element> input);

/// One table per output, over all n^k inputs in row-major order.
std::vector<OperationTable> evaluate_all(const Circuit& circuit, const Interpretation& interpretation,
                                         std::uint64_t budget = 1ull << 26);
std::vector<OperationTable> evaluate_all(const Circuit& circuit, const Algebra& algebra,
                                         std::uint64_t budget = 1ull << 26);

/// Circuit with one input per generator of the derivation and one output per
/// requested element; only ancestors of the requested elements become gates.
Circuit from_derivation(const Derivation& derivation, const Algebra& algebra,
                        std::span<const std::size_t> outputs, std::string name = "derived");

/// Drops gates that no output depends on; surviving gates keep their order.
Circuit prune_unreachable(const Circuit& circuit);

/// Definitions of derived symbols by single-output circuits. Definitions may
/// use other derived symbols as long as there is no cycle.
class SignatureExtension {
public:
    void define(std::string name, Circuit definition);
    const Circuit* find(std::string_view name) const;
    std::size_t definition_count() const { return definitions_.size(); }

private:
    std::map<std::string, Circuit, std::less<>> definitions_;
};

/// Replaces every derived gate by a fresh copy of its definition, recursively,
/// until only symbols without a definition remain.
Circuit inline_derived(const Circuit& circuit, const SignatureExtension& extension);
/// Same, and checks that every remaining symbol is a basic operation of `base`.
Circuit inline_derived(const Circuit& circuit, const SignatureExtension& extension, const Algebra& base);

/// Fully expanded term of a single-output circuit, or nullopt when it would
/// contain more than `budget` symbol and variable occurrences. Variables are
/// named x1..xk unless `variable_names` is given.
std::optional<std::string> circuit_to_term_string(const Circuit& circuit, std::uint64_t budget,
                                                  std::span<const std::string> variable_names = {});

/// Number of occurrences in the expanded term of each output (saturating).
std::uint64_t expanded_term_size(const Circuit& circuit, std::size_t output = 0);

Circuit parse_circuit(std::string_view text);
std::string serialize_circuit(const Circuit& circuit);
Circuit load_circuit(const std::string& path);
void save_circuit(const Circuit& circuit, const std::string& path);

} // namespace malcev
