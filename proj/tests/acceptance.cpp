// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "malcev/counterexample.hpp"
#include "malcev/maltsev.hpp"
#include "malcev/minority.hpp"
#include "malcev/smp.hpp"
#include "support.hpp"

using namespace malcev;
using namespace malcev::testing;

namespace {

// Chosen after measuring the sizes printed by criterion 4.
constexpr double size_constant = 1.0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) detail << "; ";
            pass = false;
            detail << what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs `body`, timing it against `limit` seconds (0 means no limit).
bool criterion(int id, const std::string& title, double limit, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double t = seconds_since(start);
    if (limit > 0 && t >= limit) o.require(false, "took longer than " + std::to_string(limit) + " s");
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << title << " (" << std::fixed
              << std::setprecision(2) << t << " s)";
    const std::string d = o.detail.str();
    if (!d.empty()) std::cout << ": " << d;
    std::cout << std::endl;
    return o.pass;
}

bool tables_equal(const OperationTable& a, const OperationTable& b) {
    return a.arity() == b.arity() && std::equal(a.values().begin(), a.values().end(), b.values().begin(),
                                                 b.values().end());
}

void check_stage_invariants(const Algebra& a, Outcome& o) {
    const std::size_t n = a.size(), pairs = n * n;
    MaltsevConstruction mc(a);
    if (mc.build_local_witnesses()) {
        o.require(false, a.name() + ": missing local witness");
        return;
    }
    mc.build_pair_circuits();
    std::uint64_t failures = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const auto [a0, b0] = enumerated_pair(n, k);
        Evaluator ev(mc.pair_circuit(a0, b0), mc.interpretation());
        const Element abb[3] = {a0, b0, b0};
        ev(abb);
        for (std::size_t j = 1; j <= pairs; ++j) failures += ev.node_values()[pair_stage_nodes(j).first] != a0;
        for (std::size_t i = 0; i < pairs; ++i) {
            const auto [ai, bi] = enumerated_pair(n, i);
            const Element in[3] = {ai, ai, bi};
            ev(in);
            // Pair i is the (i+1)-th of the enumeration, so stages j > i must fix it.
            for (std::size_t j = i + 1; j <= pairs; ++j) failures += ev.node_values()[pair_stage_nodes(j).first] != bi;
        }
    }
    const Circuit global = mc.build_global_circuit();
    Evaluator ev(global, mc.interpretation());
    for (Element x = 0; x < n; ++x)
        for (Element y = 0; y < n; ++y) {
            const Element xxy[3] = {x, x, y};
            ev(xxy);
            for (std::size_t j = 1; j <= pairs; ++j) failures += ev.node_values()[global_stage_nodes(j).second] != y;
        }
    for (std::size_t i = 0; i < pairs; ++i) {
        const auto [ai, bi] = enumerated_pair(n, i);
        const Element in[3] = {ai, bi, bi};
        ev(in);
        for (std::size_t j = i + 1; j <= pairs; ++j) failures += ev.node_values()[global_stage_nodes(j).second] != ai;
    }
    o.require(failures == 0, a.name() + ": " + std::to_string(failures) + " invariant violations");
}

} // namespace

int main() {
    bool all = true;

    all &= criterion(1, "Maltsev table of Z4", 5, [](Outcome& o) {
        const auto r = maltsev_table(affine_cyclic(4));
        o.require(std::holds_alternative<OperationTable>(r), "no table");
        if (!std::holds_alternative<OperationTable>(r)) return;
        const auto& t = std::get<OperationTable>(r);
        o.require(t.values().size() == 64, "table size " + std::to_string(t.values().size()));
        o.require(is_maltsev_table(t), maltsev_violation(t).value_or(""));
    });

    all &= criterion(2, "no Maltsev term on the two-element lattice", 1, [](Outcome& o) {
        const auto r = build_maltsev_circuit(lattice2());
        o.require(std::holds_alternative<NoMaltsev>(r), "a circuit was found");
        if (!std::holds_alternative<NoMaltsev>(r)) return;
        const Quadruple q = std::get<NoMaltsev>(r).witness;
        const std::vector<Tuple> gens = {{q.a, q.c}, {q.b, q.c}, {q.b, q.d}};
        o.require(!naive_fixpoint_oracle(lattice2(), 2, gens).count(Tuple{q.a, q.d}),
                  "oracle reaches (a,d) for the reported quadruple");
        o.detail << "quadruple " << int(q.a) << ',' << int(q.b) << ',' << int(q.c) << ',' << int(q.d);
    });

    all &= criterion(3, "stage invariants for Z4 and A3", 120, [](Outcome& o) {
        check_stage_invariants(affine_cyclic(4), o);
        check_stage_invariants(build_An(3), o);
    });

    all &= criterion(4, "inlined circuit sizes within c*n^6", 0, [](Outcome& o) {
        for (const Algebra& a : {affine_cyclic(2), affine_cyclic(4), build_An(3)}) {
            const auto r = build_maltsev_circuit(a);
            if (!std::holds_alternative<MaltsevFound>(r)) {
                o.require(false, a.name() + ": no circuit");
                continue;
            }
            const std::size_t size = std::get<MaltsevFound>(r).circuit.size();
            const double bound = size_constant * std::pow(double(a.size()), 6.0);
            o.detail << (o.detail.tellp() > 0 ? ", " : "") << a.name() << " n=" << a.size() << " size=" << size;
            o.require(double(size) <= bound, a.name() + " above the bound");
        }
        o.detail << ", c=" << size_constant;
    });

    all &= criterion(5, "minority decisions on Z2, Z4, L2, Z2xZ2", 40, [](Outcome& o) {
        auto each = [&](const Algebra& a, bool expect_yes, const OperationTable* table) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = decide_minority_bruteforce(a);
            const bool yes = std::holds_alternative<DecisionYes>(r);
            o.require(yes == expect_yes && !std::holds_alternative<DecisionExhausted>(r), a.name() + " wrong answer");
            if (yes && table) {
                o.require(tables_equal(evaluate_all(std::get<DecisionYes>(r).witness, a).front(), *table),
                          a.name() + " witness table differs from xor");
            }
            o.require(seconds_since(t0) < 10, a.name() + " took 10 s or more");
        };
        const auto x2 = xor_table(2), x4 = xor_table(4);
        each(z2_sum(), true, &x2);
        each(affine_cyclic(4), false, nullptr);
        each(lattice2(), false, nullptr);
        each(z2_squared(), true, &x4);
    });

    all &= criterion(6, "join composition", 0, [](Outcome& o) {
        const auto p = xor_table(2);
        o.require(is_minority_table(compose_minority(p, pad_minority(p))), "Z2 composition is not a minority");

        // Harvest (p, t) from searches over algebras with at most three elements.
        std::vector<Algebra> corpus = idempotent_ternary_corpus2();
        corpus.push_back(z2_squared());
        corpus.push_back(Algebra("M3", 3, {minority_on_range(3)}));
        std::mt19937_64 rng(2024);
        for (int k = 0; k < 10; ++k) {
            Algebra base = Algebra("M3", 3, {minority_on_range(3)});
            corpus.push_back(base.with_operation(random_table(rng, "g", 3, 2, true)));
        }
        Budget budget;
        budget.max_elements = 200'000;
        budget.max_applications = 2'000'000;
        std::size_t pairs = 0, failures = 0;
        for (const Algebra& a : corpus) {
            const auto mp = build_maltsev_circuit(a);
            if (!std::holds_alternative<MaltsevFound>(mp)) continue;
            const auto mt = decide_minmaj_bruteforce(a, budget);
            if (!std::holds_alternative<DecisionYes>(mt)) continue;
            const auto composed = compose_minority(a, std::get<MaltsevFound>(mp).circuit,
                                                   std::get<DecisionYes>(mt).witness);
            ++pairs;
            failures += !is_minority_table(composed.table) || !check_minority_witness(a, composed.circuit);
        }
        o.detail << pairs << " harvested pairs, " << failures << " failures";
        o.require(pairs > 0, "nothing harvested");
        o.require(failures == 0, "composition failed");
    });

    all &= criterion(7, "A3 suite", 0, [](Outcome& o) {
        const Algebra a3 = build_An(3);
        o.require(a3.size() == 12 && a3.operation_count() == 3 && a3.idempotent(), "shape");
        for (const auto& op : a3.operations()) o.require(is_maltsev_table(op), op.name() + " not Maltsev");
        const auto obs = observation_report();
        o.require(obs.pass && obs.checked == 64, "observation");
        const auto local = verify_local_minority(3);
        o.require(local.pass && local.checked == 66, "local minority");
        const auto w = witness_tuples(3);
        o.require(in_R(3, w.v1) && in_R(3, w.v2) && in_R(3, w.v3) && !in_R(3, w.v0), "witness tuples");

        auto t0 = std::chrono::steady_clock::now();
        const auto pres = verify_R_preservation(3, 1'000'000, 1);
        const double t_pres = seconds_since(t0);
        o.require(pres.pass && pres.failures == 0, "R preservation failures");
        o.require(t_pres < 60, "R preservation took 60 s or more");

        t0 = std::chrono::steady_clock::now();
        Budget b;
        b.max_elements = 100'000;
        const auto ev = verify_no_minority_evidence(3, b);
        const double t_ev = seconds_since(t0);
        o.require(ev.pass, "closure evidence: " + ev.counterexample.value_or(""));
        o.require(ev.checked <= 1024 && R_size(3) == 1024, "closure larger than R");
        o.require(t_ev < 120, "closure evidence took 120 s or more");
        o.detail << "R-preservation " << std::setprecision(2) << t_pres << " s, closure " << ev.checked
                 << " elements in " << t_ev << " s";
    });

    all &= criterion(8, "A3 has a Maltsev term but no minority-majority term found", 0, [](Outcome& o) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = build_maltsev_circuit(build_An(3));
        const double t_m = seconds_since(t0);
        o.require(std::holds_alternative<MaltsevFound>(m), "no Maltsev circuit");
        o.require(t_m < 60, "Maltsev pipeline took 60 s or more");
        const auto mm = decide_minmaj_bruteforce(build_An(3));
        o.require(!std::holds_alternative<DecisionYes>(mm), "minority-majority witness returned");
        o.detail << "minority-majority search "
                 << (std::holds_alternative<DecisionNo>(mm) ? "closed without the target" : "exhausted its budget");
    });

    all &= criterion(9, "min(A) shape for |A| = 2", 0, [](Outcome& o) {
        const auto full = build_min_instance(z2_sum(), false);
        const auto reduced = build_min_instance(z2_sum(), true);
        o.require(full.dimension == 8 && reduced.dimension == 6, "dimensions");
        for (const auto* inst : {&full, &reduced}) {
            for (std::size_t j = 0; j < inst->dimension; ++j) {
                const std::string label = std::to_string(inst->generators[0][j]) + "," +
                                          std::to_string(inst->generators[1][j]) + "," +
                                          std::to_string(inst->generators[2][j]);
                o.require(inst->coordinate_labels[j].first == j && inst->coordinate_labels[j].second == label,
                          "label mismatch at coordinate " + std::to_string(j));
                o.require(inst->target[j] ==
                              minority_of(inst->generators[0][j], inst->generators[1][j], inst->generators[2][j]),
                          "target mismatch");
            }
            o.require(parse_smp(serialize_smp(*inst)) == *inst, "round trip");
        }
    });

    all &= criterion(10, "closure engine matches the naive oracle", 0, [](Outcome& o) {
        std::mt19937_64 rng(10);
        std::size_t mismatches = 0;
        for (int k = 0; k < 50; ++k) {
            const std::size_t n = 1 + rng() % 4, d = 1 + rng() % 3;
            const Algebra a = random_algebra(rng, n, 1 + rng() % 2, 3, false);
            std::vector<Tuple> gens;
            const std::size_t count = 1 + rng() % 3;
            for (std::size_t g = 0; g < count; ++g) gens.push_back(random_tuple(rng, n, d));
            const auto r = generate(a, d, gens, std::nullopt);
            const auto elems = r.elements();
            mismatches += !r.closed() || std::set<Tuple>(elems.begin(), elems.end()) != naive_fixpoint_oracle(a, d, gens);
        }
        o.require(mismatches == 0, std::to_string(mismatches) + " of 50 differ");
    });

    return all ? 0 : 1;
}
