#include "malcev/maltsev.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <thread>

namespace malcev {

namespace {

// A ternary circuit under construction that can be evaluated at any point,
// with derived gates looked up through an interpretation.
class StagedCircuit {
public:
    StagedCircuit(std::string name, const Interpretation& interpretation)
        : builder_(std::move(name), 3), interpretation_(interpretation) {}

    NodeId add(const std::string& symbol, std::array<NodeId, 3> args) {
        tables_.push_back(&interpretation_.table(symbol, 3));
        args_.push_back(args);
        return builder_.add_gate(symbol, args);
    }

    Element value(NodeId node, std::array<Element, 3> input) {
        values_.resize(3 + tables_.size());
        std::copy(input.begin(), input.end(), values_.begin());
        const std::size_t last = node < 3 ? 0 : node - 3 + 1;
        for (std::size_t g = 0; g < last; ++g) {
            const auto& a = args_[g];
            const Element args[3] = {values_[a[0]], values_[a[1]], values_[a[2]]};
            values_[3 + g] = tables_[g]->at(args);
        }
        return values_[node];
    }

    Circuit build(std::vector<NodeId> outputs) const { return builder_.build(std::move(outputs)); }

private:
    CircuitBuilder builder_;
    const Interpretation& interpretation_;
    std::vector<const OperationTable*> tables_;
    std::vector<std::array<NodeId, 3>> args_;
    std::vector<Element> values_;
};

constexpr NodeId x_node = 0;
constexpr NodeId y_node = 1;
constexpr NodeId z_node = 2;

} // namespace

std::string local_symbol(const Quadruple& q) {
    return "local_" + std::to_string(q.a) + "_" + std::to_string(q.b) + "_" + std::to_string(q.c) + "_" +
           std::to_string(q.d);
}

std::string pair_symbol(Element a, Element b) {
    return "pair_" + std::to_string(a) + "_" + std::to_string(b);
}

std::pair<Element, Element> enumerated_pair(std::size_t n, std::size_t k) {
    return {static_cast<Element>(k / n), static_cast<Element>(k % n)};
}

std::pair<NodeId, NodeId> pair_stage_nodes(std::size_t j) {
    if (j == 0) return {x_node, y_node};
    const auto first = static_cast<NodeId>(3 + 2 * (j - 1));
    return {first, first + 1};
}

std::pair<NodeId, NodeId> global_stage_nodes(std::size_t j) {
    if (j == 0) return {y_node, z_node};
    const auto first = static_cast<NodeId>(3 + 2 * (j - 1));
    return {first, first + 1};
}

std::optional<LocalWitness> local_maltsev(const Algebra& algebra, const Quadruple& q, const Budget& budget) {
    if (!algebra.idempotent()) throw AlgebraError("local Maltsev terms need an idempotent algebra");
    const std::size_t n = algebra.size();
    if (q.a >= n || q.b >= n || q.c >= n || q.d >= n) throw AlgebraError("quadruple out of range");
    const std::vector<Tuple> gens = {{q.a, q.c}, {q.b, q.c}, {q.b, q.d}};
    auto gen = generate(algebra, 2, gens, Tuple{q.a, q.d}, budget);
    if (gen.exhausted()) {
        throw BudgetExhausted("budget exhausted while searching for " + local_symbol(q));
    }
    if (!gen.target_index()) return std::nullopt;
    const std::size_t out = *gen.target_index();
    return LocalWitness{q, from_derivation(gen.derivation(), algebra, std::span(&out, 1), local_symbol(q))};
}

MaltsevConstruction::MaltsevConstruction(const Algebra& algebra, MaltsevOptions options)
    : algebra_(&algebra), options_(options), interpretation_(algebra) {
    if (!algebra.idempotent()) throw AlgebraError("the Maltsev pipeline needs an idempotent algebra");
}

std::size_t MaltsevConstruction::quad_index(const Quadruple& q) const {
    const std::size_t n = algebra_->size();
    return ((std::size_t(q.a) * n + q.b) * n + q.c) * n + q.d;
}

std::optional<Quadruple> MaltsevConstruction::build_local_witnesses() {
    const std::size_t n = algebra_->size();
    const std::size_t total = n * n * n * n;
    auto quad_at = [n](std::size_t idx) {
        return Quadruple{static_cast<Element>(idx / (n * n * n)), static_cast<Element>(idx / (n * n) % n),
                         static_cast<Element>(idx / n % n), static_cast<Element>(idx % n)};
    };

    std::vector<std::optional<LocalWitness>> found(total);
    const unsigned threads = std::max(1u, std::min<unsigned>(options_.threads, total));
    if (threads == 1) {
        for (std::size_t idx = 0; idx < total; ++idx) {
            found[idx] = local_maltsev(*algebra_, quad_at(idx), options_.budget);
            if (!found[idx]) return quad_at(idx);
        }
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t idx = t; idx < total; idx += threads) {
                        found[idx] = local_maltsev(*algebra_, quad_at(idx), options_.budget);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (!found[idx]) return quad_at(idx);
        }
    }

    local_.clear();
    local_.reserve(total);
    for (auto& w : found) {
        interpretation_.define(local_symbol(w->quadruple), w->circuit);
        local_.push_back(std::move(w->circuit));
    }
    return std::nullopt;
}

const Circuit& MaltsevConstruction::local_witness(const Quadruple& q) const {
    if (local_.empty()) throw AlgebraError("local witnesses have not been built");
    return local_.at(quad_index(q));
}

Circuit MaltsevConstruction::build_pair_circuit(Element a, Element b) const {
    if (local_.empty()) throw AlgebraError("local witnesses have not been built");
    const std::size_t n = algebra_->size();
    StagedCircuit c(pair_symbol(a, b), interpretation_);
    NodeId xyz = x_node;  // t^j(x,y,z)
    NodeId yyz = y_node;  // t^j(y,y,z)
    for (std::size_t j = 0; j < n * n; ++j) {
        const auto [aj, bj] = enumerated_pair(n, j);
        const Element u = c.value(xyz, {aj, aj, bj});
        const std::string symbol = local_symbol({a, b, u, bj});
        const NodeId next_xyz = c.add(symbol, {xyz, yyz, z_node});
        const NodeId next_yyz = c.add(symbol, {yyz, yyz, z_node});
        xyz = next_xyz;
        yyz = next_yyz;
    }
    return c.build({xyz, yyz});
}

void MaltsevConstruction::build_pair_circuits() {
    const std::size_t n = algebra_->size();
    pair_.clear();
    for (std::size_t k = 0; k < n * n; ++k) {
        const auto [a, b] = enumerated_pair(n, k);
        pair_.push_back(build_pair_circuit(a, b));
    }
    for (std::size_t k = 0; k < n * n; ++k) {
        const auto [a, b] = enumerated_pair(n, k);
        interpretation_.define(pair_symbol(a, b), pair_[k].with_outputs({pair_[k].outputs()[0]}));
    }
}

const Circuit& MaltsevConstruction::pair_circuit(Element a, Element b) const {
    if (pair_.empty()) throw AlgebraError("pair circuits have not been built");
    return pair_.at(std::size_t(a) * algebra_->size() + b);
}

Circuit MaltsevConstruction::build_global_circuit() const {
    if (pair_.empty()) throw AlgebraError("pair circuits have not been built");
    const std::size_t n = algebra_->size();
    StagedCircuit c("maltsev", interpretation_);
    NodeId xyy = y_node;  // t_j(x,y,y)
    NodeId xyz = z_node;  // t_j(x,y,z)
    for (std::size_t j = 0; j < n * n; ++j) {
        const auto [aj, bj] = enumerated_pair(n, j);
        const Element v = c.value(xyz, {aj, bj, bj});
        const std::string symbol = pair_symbol(aj, v);
        const NodeId next_xyy = c.add(symbol, {x_node, xyy, xyy});
        const NodeId next_xyz = c.add(symbol, {x_node, xyy, xyz});
        xyy = next_xyy;
        xyz = next_xyz;
    }
    return c.build({xyy, xyz});
}

Circuit MaltsevConstruction::inline_global(const Circuit& global) const {
    const std::size_t n = algebra_->size();
    SignatureExtension ext;
    for (std::size_t idx = 0; idx < local_.size(); ++idx) ext.define(local_[idx].name(), local_[idx]);
    for (std::size_t k = 0; k < pair_.size(); ++k) {
        const auto [a, b] = enumerated_pair(n, k);
        ext.define(pair_symbol(a, b), pair_[k].with_outputs({pair_[k].outputs()[0]}));
    }
    Circuit result = prune_unreachable(inline_derived(global.with_outputs({global.outputs().back()}), ext, *algebra_));
    const double bound = options_.size_constant * std::pow(double(n), 6.0);
    if (double(result.size()) > bound) {
        throw std::logic_error("inlined Maltsev circuit has " + std::to_string(result.size()) +
                               " nodes, above the sanity bound");
    }
    return result;
}

MaltsevOutcome build_maltsev_circuit(const Algebra& algebra, const MaltsevOptions& options) {
    MaltsevConstruction construction(algebra, options);
    if (auto missing = construction.build_local_witnesses()) return NoMaltsev{*missing};
    construction.build_pair_circuits();
    Circuit circuit = construction.inline_global(construction.build_global_circuit());
    std::optional<OperationTable> table;
    if (options.compute_table) table = evaluate_all(circuit, algebra).front();
    return MaltsevFound{std::move(circuit), std::move(table)};
}

std::variant<OperationTable, NoMaltsev> maltsev_table(const Algebra& algebra, const MaltsevOptions& options) {
    auto opts = options;
    opts.compute_table = true;
    auto outcome = build_maltsev_circuit(algebra, opts);
    if (auto* none = std::get_if<NoMaltsev>(&outcome)) return *none;
    auto& found = std::get<MaltsevFound>(outcome);
    const auto values = found.table->values();
    return OperationTable("maltsev", algebra.size(), 3, std::vector<Element>(values.begin(), values.end()));
}

bool is_maltsev_table(const OperationTable& table) {
    if (table.arity() != 3) throw AlgebraError("Maltsev check needs a ternary table");
    const std::size_t n = table.universe_size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const Element ex = static_cast<Element>(x), ey = static_cast<Element>(y);
            const Element xxy[3] = {ex, ex, ey};
            const Element yxx[3] = {ey, ex, ex};
            if (table.at(xxy) != ey || table.at(yxx) != ey) return false;
        }
    }
    return true;
}

} // namespace malcev
