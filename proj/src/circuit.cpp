#include "malcev/circuit.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "text_io.hpp"

namespace malcev {

// ---------------------------------------------------------------------------
// Circuit

Circuit Circuit::with_outputs(std::vector<NodeId> outputs) const {
    if (outputs.empty()) throw CircuitError("a circuit needs at least one output");
    for (NodeId o : outputs) {
        if (o >= size()) throw CircuitError("output references a missing node");
    }
    Circuit c = *this;
    c.outputs_ = std::move(outputs);
    return c;
}

Circuit Circuit::renamed(std::string name) const {
    Circuit c = *this;
    c.name_ = std::move(name);
    return c;
}

bool Circuit::operator==(const Circuit& other) const {
    if (name_ != other.name_ || inputs_ != other.inputs_ || outputs_ != other.outputs_ ||
        args_ != other.args_ || arg_offset_ != other.arg_offset_ ||
        gate_count() != other.gate_count()) {
        return false;
    }
    for (std::size_t g = 0; g < gate_count(); ++g) {
        if (symbols_[gate_symbol_[g]] != other.symbols_[other.gate_symbol_[g]]) return false;
    }
    return true;
}

CircuitBuilder::CircuitBuilder(std::string name, std::size_t inputs) {
    if (inputs == 0) throw CircuitError("a circuit needs at least one input");
    circuit_.name_ = std::move(name);
    circuit_.inputs_ = inputs;
}

NodeId CircuitBuilder::input(std::size_t i) const {
    if (i >= circuit_.inputs_) throw CircuitError("input index out of range");
    return static_cast<NodeId>(i);
}

std::uint32_t CircuitBuilder::intern(std::string_view symbol, std::size_t arity) {
    auto it = symbol_index_.find(std::string(symbol));
    if (it != symbol_index_.end()) {
        if (circuit_.symbols_[it->second].arity != arity) {
            throw CircuitError("symbol '" + std::string(symbol) + "' used with arities " +
                               std::to_string(circuit_.symbols_[it->second].arity) + " and " +
                               std::to_string(arity));
        }
        return it->second;
    }
    auto idx = static_cast<std::uint32_t>(circuit_.symbols_.size());
    circuit_.symbols_.push_back({std::string(symbol), arity});
    symbol_index_.emplace(std::string(symbol), idx);
    return idx;
}

NodeId CircuitBuilder::add_gate(std::string_view symbol, std::span<const NodeId> args) {
    if (symbol.empty()) throw CircuitError("gate symbol must not be empty");
    if (args.empty()) throw CircuitError("gate '" + std::string(symbol) + "' has no arguments");
    const std::size_t nodes = circuit_.size();
    for (NodeId a : args) {
        if (a >= nodes) {
            throw CircuitError("gate '" + std::string(symbol) + "' references node " +
                               std::to_string(a) + " which is not earlier");
        }
    }
    if (nodes >= std::numeric_limits<NodeId>::max()) throw CircuitError("circuit too large");
    circuit_.gate_symbol_.push_back(intern(symbol, args.size()));
    circuit_.args_.insert(circuit_.args_.end(), args.begin(), args.end());
    circuit_.arg_offset_.push_back(circuit_.args_.size());
    return static_cast<NodeId>(nodes);
}

Circuit CircuitBuilder::build(std::vector<NodeId> outputs) const {
    return circuit_.with_outputs(std::move(outputs));
}

// ---------------------------------------------------------------------------
// Interpretation and evaluation

Interpretation::Interpretation(const Algebra& algebra, std::uint64_t table_budget)
    : algebra_(&algebra), table_budget_(table_budget) {}

void Interpretation::define(std::string name, Circuit definition) {
    if (definition.outputs().size() != 1) {
        throw CircuitError("definition of '" + name + "' must have exactly one output");
    }
    if (algebra_->find_operation(name) != algebra_->operation_count()) {
        throw CircuitError("'" + name + "' is already a basic operation");
    }
    derived_tables_.erase(name);
    definitions_.insert_or_assign(std::move(name), std::move(definition));
}

bool Interpretation::defines(std::string_view name) const {
    return definitions_.find(name) != definitions_.end() ||
           algebra_->find_operation(name) != algebra_->operation_count();
}

const OperationTable& Interpretation::table(std::string_view symbol, std::size_t arity) const {
    const std::size_t op = algebra_->find_operation(symbol);
    if (op != algebra_->operation_count()) {
        const auto& t = algebra_->operation(op);
        if (t.arity() != arity) {
            throw CircuitError("symbol '" + std::string(symbol) + "' has arity " +
                               std::to_string(t.arity()) + ", used with " + std::to_string(arity));
        }
        return t;
    }
    auto def = definitions_.find(symbol);
    if (def == definitions_.end()) throw CircuitError("unknown symbol '" + std::string(symbol) + "'");
    if (def->second.input_count() != arity) {
        throw CircuitError("derived symbol '" + std::string(symbol) + "' has arity " +
                           std::to_string(def->second.input_count()) + ", used with " +
                           std::to_string(arity));
    }
    if (auto cached = derived_tables_.find(symbol); cached != derived_tables_.end()) {
        return *cached->second;
    }
    if (std::find(in_progress_.begin(), in_progress_.end(), symbol) != in_progress_.end()) {
        throw CircuitError("cyclic definition of '" + std::string(symbol) + "'");
    }
    in_progress_.emplace_back(symbol);
    std::vector<OperationTable> tables;
    try {
        tables = evaluate_all(def->second, *this, table_budget_);
    } catch (...) {
        in_progress_.pop_back();
        throw;
    }
    in_progress_.pop_back();
    auto stored = std::make_unique<OperationTable>(std::string(symbol), algebra_->size(), arity,
                                                   std::vector<Element>(tables.front().values().begin(),
                                                                        tables.front().values().end()));
    auto [it, _] = derived_tables_.emplace(std::string(symbol), std::move(stored));
    return *it->second;
}

Evaluator::Evaluator(const Circuit& circuit, const Algebra& algebra) : circuit_(&circuit) {
    Interpretation base(algebra);
    bind(base);
}

Evaluator::Evaluator(const Circuit& circuit, const Interpretation& interpretation)
    : circuit_(&circuit) {
    bind(interpretation);
}

void Evaluator::bind(const Interpretation& interpretation) {
    universe_ = interpretation.algebra().size();
    bound_.clear();
    for (const auto& s : circuit_->symbols()) bound_.push_back(&interpretation.table(s.name, s.arity));
    values_.assign(circuit_->size(), 0);
}

void Evaluator::run(std::span<const Element> input) {
    const std::size_t k = circuit_->input_count();
    if (input.size() != k) {
        throw CircuitError("circuit '" + circuit_->name() + "' expects " + std::to_string(k) +
                           " inputs, got " + std::to_string(input.size()));
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (input[i] >= universe_) throw CircuitError("input element out of range");
        values_[i] = input[i];
    }
    const std::size_t gates = circuit_->gate_count();
    const std::size_t n = universe_;
    for (std::size_t g = 0; g < gates; ++g) {
        const OperationTable& t = *bound_[circuit_->gate_symbol(g)];
        std::size_t idx = 0;
        for (NodeId a : circuit_->gate_args(g)) idx = idx * n + values_[a];
        values_[k + g] = t.at_index(idx);
    }
    gate_visits_ += gates;
}

Tuple Evaluator::operator()(std::span<const Element> input) {
    run(input);
    Tuple out;
    out.reserve(circuit_->outputs().size());
    for (NodeId o : circuit_->outputs()) out.push_back(values_[o]);
    return out;
}

Tuple evaluate(const Circuit& circuit, const Algebra& algebra, std::span<const Element> input) {
    Evaluator eval(circuit, algebra);
    return eval(input);
}

std::vector<OperationTable> evaluate_all(const Circuit& circuit, const Interpretation& interpretation,
                                         std::uint64_t budget) {
    const std::size_t n = interpretation.algebra().size();
    const std::size_t k = circuit.input_count();
    std::uint64_t count = 0;
    try {
        count = checked_power(n, k);
    } catch (const AlgebraError&) {
        throw CircuitError("table of circuit '" + circuit.name() + "' exceeds the evaluation budget");
    }
    if (count > budget) {
        throw CircuitError("table of circuit '" + circuit.name() + "' has " + std::to_string(count) +
                           " entries, over the evaluation budget of " + std::to_string(budget));
    }
    Evaluator eval(circuit, interpretation);
    const std::size_t outs = circuit.outputs().size();
    std::vector<std::vector<Element>> columns(outs, std::vector<Element>(count));
    Tuple input(k, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        eval(input);
        for (std::size_t o = 0; o < outs; ++o) columns[o][idx] = eval.output_value(o);
        for (std::size_t pos = k; pos-- > 0;) {
            if (++input[pos] < n) break;
            input[pos] = 0;
        }
    }
    std::vector<OperationTable> tables;
    for (std::size_t o = 0; o < outs; ++o) {
        std::string name = outs == 1 ? circuit.name() : circuit.name() + "_" + std::to_string(o + 1);
        tables.emplace_back(std::move(name), n, k, std::move(columns[o]));
    }
    return tables;
}

std::vector<OperationTable> evaluate_all(const Circuit& circuit, const Algebra& algebra,
                                         std::uint64_t budget) {
    Interpretation base(algebra, budget);
    return evaluate_all(circuit, base, budget);
}

// ---------------------------------------------------------------------------
// Derivations

Circuit from_derivation(const Derivation& derivation, const Algebra& algebra,
                        std::span<const std::size_t> outputs, std::string name) {
    if (outputs.empty()) throw CircuitError("from_derivation needs at least one output");
    const std::size_t total = derivation.element_count();
    std::vector<char> needed(total, 0);
    for (std::size_t o : outputs) {
        if (o >= total) throw CircuitError("requested element " + std::to_string(o) + " does not exist");
        needed[o] = 1;
    }
    for (std::size_t e = total; e-- > derivation.generator_count();) {
        if (!needed[e]) continue;
        for (auto p : derivation.producer(e).parents) needed[p] = 1;
    }
    CircuitBuilder builder(std::move(name), derivation.input_count());
    std::vector<NodeId> node_of(total, 0);
    std::vector<NodeId> args;
    for (std::size_t e = 0; e < total; ++e) {
        if (!needed[e]) continue;
        if (derivation.is_generator(e)) {
            node_of[e] = builder.input(derivation.input_of_generator(e));
            continue;
        }
        auto step = derivation.producer(e);
        if (step.op >= algebra.operation_count()) throw CircuitError("derivation uses an unknown operation");
        const auto& op = algebra.operation(step.op);
        if (op.arity() != step.parents.size()) throw CircuitError("derivation step has wrong arity");
        args.clear();
        for (auto p : step.parents) args.push_back(node_of[p]);
        node_of[e] = builder.add_gate(op.name(), args);
    }
    std::vector<NodeId> out;
    for (std::size_t o : outputs) out.push_back(node_of[o]);
    return builder.build(std::move(out));
}

Circuit prune_unreachable(const Circuit& circuit) {
    std::vector<char> needed(circuit.size(), 0);
    for (NodeId o : circuit.outputs()) needed[o] = 1;
    for (std::size_t g = circuit.gate_count(); g-- > 0;) {
        if (!needed[circuit.gate_node(g)]) continue;
        for (NodeId a : circuit.gate_args(g)) needed[a] = 1;
    }
    CircuitBuilder builder(circuit.name(), circuit.input_count());
    std::vector<NodeId> node_of(circuit.size());
    for (std::size_t i = 0; i < circuit.input_count(); ++i) node_of[i] = builder.input(i);
    std::vector<NodeId> args;
    for (std::size_t g = 0; g < circuit.gate_count(); ++g) {
        if (!needed[circuit.gate_node(g)]) continue;
        args.clear();
        for (NodeId a : circuit.gate_args(g)) args.push_back(node_of[a]);
        node_of[circuit.gate_node(g)] = builder.add_gate(circuit.symbols()[circuit.gate_symbol(g)].name, args);
    }
    std::vector<NodeId> outputs;
    for (NodeId o : circuit.outputs()) outputs.push_back(node_of[o]);
    return builder.build(std::move(outputs));
}

// ---------------------------------------------------------------------------
// Inlining

void SignatureExtension::define(std::string name, Circuit definition) {
    if (definition.outputs().size() != 1) {
        throw CircuitError("definition of '" + name + "' must have exactly one output");
    }
    definitions_.insert_or_assign(std::move(name), std::move(definition));
}

const Circuit* SignatureExtension::find(std::string_view name) const {
    auto it = definitions_.find(name);
    return it == definitions_.end() ? nullptr : &it->second;
}

namespace {

class Inliner {
public:
    Inliner(const SignatureExtension& ext, CircuitBuilder& builder) : ext_(ext), builder_(builder) {}

    std::vector<NodeId> copy(const Circuit& c, std::span<const NodeId> inputs) {
        std::vector<NodeId> node_of(c.size());
        for (std::size_t i = 0; i < c.input_count(); ++i) node_of[i] = inputs[i];
        std::vector<NodeId> args;
        for (std::size_t g = 0; g < c.gate_count(); ++g) {
            const Symbol& sym = c.symbols()[c.gate_symbol(g)];
            args.clear();
            for (NodeId a : c.gate_args(g)) args.push_back(node_of[a]);
            const Circuit* def = ext_.find(sym.name);
            if (def == nullptr) {
                node_of[c.gate_node(g)] = builder_.add_gate(sym.name, args);
                continue;
            }
            if (def->input_count() != sym.arity) {
                throw CircuitError("derived symbol '" + sym.name + "' has arity " +
                                   std::to_string(def->input_count()) + " but a gate passes " +
                                   std::to_string(sym.arity) + " arguments");
            }
            if (std::find(stack_.begin(), stack_.end(), sym.name) != stack_.end()) {
                throw CircuitError("cyclic definition of '" + sym.name + "'");
            }
            stack_.push_back(sym.name);
            node_of[c.gate_node(g)] = copy(*def, args).front();
            stack_.pop_back();
        }
        std::vector<NodeId> outs;
        for (NodeId o : c.outputs()) outs.push_back(node_of[o]);
        return outs;
    }

private:
    const SignatureExtension& ext_;
    CircuitBuilder& builder_;
    std::vector<std::string> stack_;
};

} // namespace

Circuit inline_derived(const Circuit& circuit, const SignatureExtension& extension) {
    CircuitBuilder builder(circuit.name(), circuit.input_count());
    std::vector<NodeId> inputs(circuit.input_count());
    for (std::size_t i = 0; i < inputs.size(); ++i) inputs[i] = builder.input(i);
    Inliner inliner(extension, builder);
    return builder.build(inliner.copy(circuit, inputs));
}

Circuit inline_derived(const Circuit& circuit, const SignatureExtension& extension, const Algebra& base) {
    Circuit result = inline_derived(circuit, extension);
    for (const auto& sym : result.symbols()) {
        const std::size_t op = base.find_operation(sym.name);
        if (op == base.operation_count()) {
            throw CircuitError("symbol '" + sym.name + "' has no definition and is not a basic operation");
        }
        if (base.operation(op).arity() != sym.arity) {
            throw CircuitError("symbol '" + sym.name + "' is used with arity " + std::to_string(sym.arity) +
                               " but the basic operation has arity " +
                               std::to_string(base.operation(op).arity()));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Term expansion

namespace {

constexpr std::uint64_t saturated = std::numeric_limits<std::uint64_t>::max();

std::vector<std::uint64_t> node_term_sizes(const Circuit& c) {
    std::vector<std::uint64_t> sizes(c.size(), 1);
    for (std::size_t g = 0; g < c.gate_count(); ++g) {
        std::uint64_t s = 1;
        for (NodeId a : c.gate_args(g)) {
            s = (sizes[a] > saturated - s) ? saturated : s + sizes[a];
        }
        sizes[c.gate_node(g)] = s;
    }
    return sizes;
}

} // namespace

std::uint64_t expanded_term_size(const Circuit& circuit, std::size_t output) {
    return node_term_sizes(circuit)[circuit.outputs()[output]];
}

std::optional<std::string> circuit_to_term_string(const Circuit& circuit, std::uint64_t budget,
                                                  std::span<const std::string> variable_names) {
    if (circuit.outputs().size() != 1) throw CircuitError("term expansion needs a single-output circuit");
    if (!variable_names.empty() && variable_names.size() != circuit.input_count()) {
        throw CircuitError("wrong number of variable names");
    }
    if (expanded_term_size(circuit) > budget) return std::nullopt;

    std::vector<std::optional<std::string>> memo(circuit.size());
    auto render = [&](auto&& self, NodeId node) -> const std::string& {
        if (memo[node]) return *memo[node];
        std::string s;
        if (circuit.is_input(node)) {
            s = variable_names.empty() ? "x" + std::to_string(node + 1) : variable_names[node];
        } else {
            std::size_t g = node - circuit.input_count();
            s = circuit.symbols()[circuit.gate_symbol(g)].name + "(";
            bool first = true;
            for (NodeId a : circuit.gate_args(g)) {
                if (!first) s += ',';
                first = false;
                s += self(self, a);
            }
            s += ')';
        }
        memo[node] = std::move(s);
        return *memo[node];
    };
    return render(render, circuit.outputs().front());
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string node_label(const Circuit& c, NodeId node) {
    if (c.is_input(node)) return "x" + std::to_string(node + 1);
    return "g" + std::to_string(node - c.input_count() + 1);
}

} // namespace

std::string serialize_circuit(const Circuit& circuit) {
    std::ostringstream out;
    out << "circuit " << circuit.name() << "\n";
    out << "inputs " << circuit.input_count() << "\n";
    for (std::size_t g = 0; g < circuit.gate_count(); ++g) {
        out << "gate g" << (g + 1) << " " << circuit.symbols()[circuit.gate_symbol(g)].name;
        for (NodeId a : circuit.gate_args(g)) out << " " << node_label(circuit, a);
        out << "\n";
    }
    out << "outputs";
    for (NodeId o : circuit.outputs()) out << " " << node_label(circuit, o);
    out << "\n";
    return out.str();
}

Circuit parse_circuit(std::string_view text) {
    detail::TokenStream<CircuitError> in(text, "circuit");
    in.expect("circuit");
    std::string name = in.next("circuit name");
    in.expect("inputs");
    std::size_t inputs_line = in.line_of_next();
    std::uint64_t k = in.next_uint("input count");
    if (k == 0) in.fail(inputs_line, "a circuit needs at least one input");
    CircuitBuilder builder(std::move(name), k);

    auto parse_ref = [&](std::size_t line, const std::string& tok) -> NodeId {
        if (tok.size() >= 2 && (tok[0] == 'x' || tok[0] == 'g')) {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), v);
            if (ec == std::errc() && ptr == tok.data() + tok.size() && v >= 1) {
                if (tok[0] == 'x') {
                    if (v <= k) return static_cast<NodeId>(v - 1);
                    in.fail(line, "input '" + tok + "' does not exist");
                }
                if (k + v - 1 < builder.node_count()) return static_cast<NodeId>(k + v - 1);
                in.fail(line, "gate reference '" + tok + "' is not earlier");
            }
        }
        in.fail(line, "malformed node reference '" + tok + "'");
    };

    std::size_t gates = 0;
    while (!in.done() && in.peek().text == "gate") {
        const std::size_t line = in.peek().line;
        in.next("gate");
        std::string id = in.next("gate id");
        if (id != "g" + std::to_string(gates + 1)) {
            in.fail(line, "expected gate id g" + std::to_string(gates + 1) + ", found '" + id + "'");
        }
        std::string symbol = in.next("operation name");
        std::vector<NodeId> args;
        while (!in.done() && in.peek().line == line) args.push_back(parse_ref(line, in.next("argument")));
        if (args.empty()) in.fail(line, "gate " + id + " has no arguments");
        try {
            builder.add_gate(symbol, args);
        } catch (const CircuitError& e) {
            in.fail(line, e.what());
        }
        ++gates;
    }
    const std::size_t out_line = in.line_of_next();
    in.expect("outputs");
    std::vector<NodeId> outputs;
    while (!in.done() && in.peek().line == out_line) outputs.push_back(parse_ref(out_line, in.next("output")));
    if (outputs.empty()) in.fail(out_line, "a circuit needs at least one output");
    if (!in.done()) in.fail(in.line_of_next(), "unexpected '" + in.peek().text + "' after outputs");
    return builder.build(std::move(outputs));
}

Circuit load_circuit(const std::string& path) {
    return parse_circuit(detail::read_file<CircuitError>(path));
}

void save_circuit(const Circuit& circuit, const std::string& path) {
    detail::write_file<CircuitError>(path, serialize_circuit(circuit));
}

} // namespace malcev
