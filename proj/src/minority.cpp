#include "malcev/minority.hpp"

#include <array>
#include <sstream>

#include "malcev/maltsev.hpp"

namespace malcev {

namespace {

std::string show(const char* symbol, std::initializer_list<std::size_t> args, std::size_t value,
                 std::size_t expected) {
    std::ostringstream out;
    out << symbol << '(';
    bool first = true;
    for (auto a : args) {
        out << (first ? "" : ",") << a;
        first = false;
    }
    out << ")=" << value << ", expected " << expected;
    return out.str();
}

Element at3(const OperationTable& t, std::size_t a, std::size_t b, std::size_t c) {
    const std::size_t n = t.universe_size();
    return t.at_index((a * n + b) * n + c);
}

std::string unused_name(const Algebra& algebra, std::string base) {
    std::string name = base;
    for (int i = 1; algebra.find_operation(name) != algebra.operation_count(); ++i) {
        name = base + "_" + std::to_string(i);
    }
    return name;
}

} // namespace

std::optional<std::string> minority_violation(const OperationTable& m) {
    if (m.arity() != 3) throw AlgebraError("minority check needs a ternary table");
    const std::size_t n = m.universe_size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (auto v = at3(m, y, x, x); v != y) return show("m", {y, x, x}, v, y);
            if (auto v = at3(m, x, y, x); v != y) return show("m", {x, y, x}, v, y);
            if (auto v = at3(m, x, x, y); v != y) return show("m", {x, x, y}, v, y);
        }
    }
    return std::nullopt;
}

std::optional<std::string> maltsev_violation(const OperationTable& p) {
    if (p.arity() != 3) throw AlgebraError("Maltsev check needs a ternary table");
    const std::size_t n = p.universe_size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (auto v = at3(p, x, x, y); v != y) return show("p", {x, x, y}, v, y);
            if (auto v = at3(p, y, x, x); v != y) return show("p", {y, x, x}, v, y);
        }
    }
    return std::nullopt;
}

std::optional<std::string> minmaj_violation(const OperationTable& t) {
    if (t.arity() != 6) throw AlgebraError("minority-majority check needs a six-ary table");
    const std::size_t n = t.universe_size();
    auto at6 = [&](std::array<std::size_t, 6> a) {
        std::size_t idx = 0;
        for (auto v : a) idx = idx * n + v;
        return t.at_index(idx);
    };
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t z = 0; z < n; ++z) {
                if (auto v = at6({y, x, x, z, y, y}); v != y) return show("t", {y, x, x, z, y, y}, v, y);
                if (auto v = at6({x, y, x, y, z, y}); v != y) return show("t", {x, y, x, y, z, y}, v, y);
                if (auto v = at6({x, x, y, y, y, z}); v != y) return show("t", {x, x, y, y, y, z}, v, y);
            }
        }
    }
    return std::nullopt;
}

bool is_minority_table(const OperationTable& table) { return !minority_violation(table); }
bool is_minmaj_table(const OperationTable& table) { return !minmaj_violation(table); }

OperationTable compose_minority(const OperationTable& p, const OperationTable& t) {
    if (p.arity() != 3 || t.arity() != 6) throw AlgebraError("compose_minority needs a ternary p and six-ary t");
    if (p.universe_size() != t.universe_size()) throw AlgebraError("p and t live on different universes");
    if (auto v = maltsev_violation(p)) throw PreconditionError("p is not a Maltsev operation: " + *v);
    if (auto v = minmaj_violation(t)) throw PreconditionError("t is not a minority-majority operation: " + *v);
    const std::size_t n = p.universe_size();
    return make_table("minority", n, 3, [&](std::span<const Element> a) {
        const Element x = a[0], y = a[1], z = a[2];
        const Element args[6] = {x, y, z, at3(p, z, x, y), at3(p, x, y, z), at3(p, y, z, x)};
        return t.at(args);
    });
}

ComposedMinority compose_minority(const Algebra& algebra, const Circuit& p, const Circuit& t) {
    if (p.input_count() != 3 || p.outputs().size() != 1) throw AlgebraError("p must be a single-output ternary circuit");
    if (t.input_count() != 6 || t.outputs().size() != 1) throw AlgebraError("t must be a single-output six-ary circuit");
    const auto p_table = evaluate_all(p, algebra).front();
    const auto t_table = evaluate_all(t, algebra).front();
    if (auto v = maltsev_violation(p_table)) throw PreconditionError("p is not a Maltsev term: " + *v);
    if (auto v = minmaj_violation(t_table)) throw PreconditionError("t is not a minority-majority term: " + *v);

    const std::string p_name = unused_name(algebra, "compose_p");
    const std::string t_name = unused_name(algebra, "compose_t");
    CircuitBuilder b("minority", 3);
    const NodeId x = 0, y = 1, z = 2;
    const NodeId pzxy = b.add_gate(p_name, {z, x, y});
    const NodeId pxyz = b.add_gate(p_name, {x, y, z});
    const NodeId pyzx = b.add_gate(p_name, {y, z, x});
    const NodeId out = b.add_gate(t_name, {x, y, z, pzxy, pxyz, pyzx});
    SignatureExtension ext;
    ext.define(p_name, p);
    ext.define(t_name, t);
    Circuit circuit = inline_derived(b.build({out}), ext, algebra);
    OperationTable table = evaluate_all(circuit, algebra).front();
    return {std::move(circuit), std::move(table)};
}

OperationTable pad_minority(const OperationTable& m) {
    if (m.arity() != 3) throw AlgebraError("padding needs a ternary table");
    return make_table(m.name() + "_padded", m.universe_size(), 6,
                      [&](std::span<const Element> a) { return m.at(a.first(3)); });
}

Element minority_of(Element a, Element b, Element c) {
    if (b == c) return a;
    if (a == c) return b;
    if (a == b) return c;
    throw AlgebraError("minority_of needs a triple with at most two distinct entries");
}

SmpInstance build_min_instance(const Algebra& algebra, bool idempotent_reduce) {
    if (idempotent_reduce && !algebra.idempotent()) {
        throw AlgebraError("the idempotent reduction needs an idempotent algebra");
    }
    const std::size_t n = algebra.size();
    // With one element every triple is constant; keep it so the instance is nonempty.
    const bool drop_constant = idempotent_reduce && n > 1;
    SmpInstance inst;
    inst.name = "min_" + algebra.name();
    inst.generators.assign(3, Tuple{});
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                const bool constant = a == b && b == c;
                const bool two_valued = a == b || b == c || a == c;
                if (!two_valued || (constant && drop_constant)) continue;
                const Element ea = static_cast<Element>(a), eb = static_cast<Element>(b),
                              ec = static_cast<Element>(c);
                inst.coordinate_labels.emplace_back(inst.target.size(), std::to_string(a) + "," +
                                                                            std::to_string(b) + "," +
                                                                            std::to_string(c));
                inst.generators[0].push_back(ea);
                inst.generators[1].push_back(eb);
                inst.generators[2].push_back(ec);
                inst.target.push_back(minority_of(ea, eb, ec));
            }
        }
    }
    inst.dimension = inst.target.size();
    return inst;
}

SmpInstance build_minmaj_instance(const Algebra& algebra) {
    const std::size_t n = algebra.size();
    SmpInstance inst;
    inst.name = "minmaj_" + algebra.name();
    inst.generators.assign(6, Tuple{});
    for (int eq = 1; eq <= 3; ++eq) {
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t y = 0; y < n; ++y) {
                for (std::size_t z = 0; z < n; ++z) {
                    std::array<std::size_t, 6> pattern{};
                    switch (eq) {
                    case 1: pattern = {y, x, x, z, y, y}; break;
                    case 2: pattern = {x, y, x, y, z, y}; break;
                    default: pattern = {x, x, y, y, y, z}; break;
                    }
                    for (std::size_t k = 0; k < 6; ++k) {
                        inst.generators[k].push_back(static_cast<Element>(pattern[k]));
                    }
                    inst.coordinate_labels.emplace_back(inst.target.size(),
                                                        std::to_string(eq) + ":" + std::to_string(x) + "," +
                                                            std::to_string(y) + "," + std::to_string(z));
                    inst.target.push_back(static_cast<Element>(y));
                }
            }
        }
    }
    inst.dimension = inst.target.size();
    return inst;
}

bool check_minority_witness(const Algebra& algebra, const Circuit& circuit) {
    if (circuit.input_count() != 3 || circuit.outputs().size() != 1) {
        throw CircuitError("a minority witness is a single-output ternary circuit");
    }
    return is_minority_table(evaluate_all(circuit, algebra).front());
}

namespace {

DecisionOutcome decide(const Algebra& algebra, const SmpInstance& inst, const Budget& budget,
                       const std::string& witness_name) {
    auto res = member(algebra, inst.generators, inst.target, budget);
    switch (res.answer) {
    case Membership::no: return DecisionNo{};
    case Membership::exhausted:
        return DecisionExhausted{res.generation.size(), res.generation.applications()};
    case Membership::yes: break;
    }
    const std::size_t out = *res.generation.target_index();
    return DecisionYes{from_derivation(res.generation.derivation(), algebra, std::span(&out, 1), witness_name)};
}

} // namespace

DecisionOutcome decide_minority_bruteforce(const Algebra& algebra, const Budget& budget, bool idempotent_reduce) {
    const auto inst = build_min_instance(algebra, idempotent_reduce && algebra.idempotent());
    auto outcome = decide(algebra, inst, budget, "minority");
    if (auto* yes = std::get_if<DecisionYes>(&outcome)) {
        if (!check_minority_witness(algebra, yes->witness)) {
            throw std::logic_error("minority witness failed its certificate check");
        }
    }
    return outcome;
}

DecisionOutcome decide_minmaj_bruteforce(const Algebra& algebra, const Budget& budget) {
    const auto inst = build_minmaj_instance(algebra);
    auto outcome = decide(algebra, inst, budget, "minmaj");
    if (auto* yes = std::get_if<DecisionYes>(&outcome)) {
        if (!is_minmaj_table(evaluate_all(yes->witness, algebra).front())) {
            throw std::logic_error("minority-majority witness failed its check");
        }
    }
    return outcome;
}

SmpunInstance fixed_no_instance() {
    Algebra semilattice("fixed_no", 2, {OperationTable("meet", 2, 2, {0, 0, 0, 1})});
    SmpInstance inst;
    inst.name = "fixed_no";
    inst.dimension = 1;
    inst.generators = {Tuple{0}};
    inst.target = Tuple{1};
    return {std::move(semilattice), std::move(inst), true};
}

SmpunInstance reduce_to_smpun(const Algebra& algebra, const Budget& budget) {
    if (!algebra.idempotent()) throw AlgebraError("the reduction needs an idempotent algebra");
    MaltsevOptions options;
    options.budget = budget;
    auto table = maltsev_table(algebra, options);
    if (std::holds_alternative<NoMaltsev>(table)) return fixed_no_instance();
    const auto& p = std::get<OperationTable>(table);
    const auto values = p.values();
    Algebra augmented = algebra.with_operation(OperationTable(
        unused_name(algebra, "maltsev"), algebra.size(), 3, std::vector<Element>(values.begin(), values.end())));
    SmpInstance inst = build_min_instance(augmented, true);
    return {std::move(augmented), std::move(inst), false};
}

} // namespace malcev
