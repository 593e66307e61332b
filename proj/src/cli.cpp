#include "malcev/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <thread>

#include "malcev/algebra.hpp"
#include "malcev/circuit.hpp"
#include "malcev/counterexample.hpp"
#include "malcev/maltsev.hpp"
#include "malcev/minority.hpp"
#include "malcev/smp.hpp"
#include "malcev/subpower.hpp"

namespace malcev::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

unsigned thread_cap() {
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MALCEV_THREADS")) {
        try {
            const unsigned long cap = std::stoul(env);
            if (cap > 0) threads = std::min<unsigned long>(threads, cap);
        } catch (const std::exception&) {
            throw UsageError("MALCEV_THREADS must be a positive integer");
        }
    }
    return threads;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    fs::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

Tuple parse_tuple(const std::string& text) {
    Tuple t;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &used);
        } catch (const std::exception&) {
            throw UsageError("malformed input tuple '" + text + "'");
        }
        if (used != item.size() || v >= max_universe_size) throw UsageError("malformed input tuple '" + text + "'");
        t.push_back(static_cast<Element>(v));
    }
    return t;
}

std::string join(std::span<const Element> values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
    return s;
}

struct BudgetFlags {
    std::uint64_t elements = Budget{}.max_elements;
    std::uint64_t applications = Budget{}.max_applications;

    void attach(CLI::App* cmd) {
        cmd->add_option("--budget-elems", elements, "Maximum number of generated elements")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--budget-apps", applications, "Maximum number of operation applications")
            ->check(CLI::PositiveNumber);
    }
    Budget budget() const {
        Budget b;
        b.max_elements = elements;
        b.max_applications = applications;
        return b;
    }
};

int report_decision(const DecisionOutcome& outcome, const Algebra& algebra, const std::string& witness_path,
                    const char* what, std::ostream& out, std::ostream& err) {
    if (const auto* yes = std::get_if<DecisionYes>(&outcome)) {
        save_circuit(yes->witness, witness_path);
        err << algebra.name() << " has a " << what << " term; witness circuit with " << yes->witness.size()
            << " nodes\n";
        out << "RESULT yes witness=" << witness_path << '\n';
        return success;
    }
    if (std::holds_alternative<DecisionNo>(outcome)) {
        err << algebra.name() << " has no " << what << " term\n";
        out << "RESULT no\n";
        return negative;
    }
    const auto& ex = std::get<DecisionExhausted>(outcome);
    err << "budget exhausted after " << ex.elements << " elements and " << ex.applications << " applications\n";
    out << "RESULT exhausted\n";
    return inconclusive;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Maltsev and minority terms of finite idempotent algebras", "malcev");
    app.require_subcommand(1);
    std::function<int()> action;

    std::string alg_path, circ_path, smp_path, out_path, tuple_text;
    std::vector<std::string> definition_paths;
    BudgetFlags budget;
    bool no_reduce = false;
    std::size_t an_n = 0, output_index = 0;
    std::uint64_t term_budget = 10'000, samples = 1'000'000, seed = 1, subset_cap = 1'000'000;
    std::uint64_t an_budget = 100'000;

    auto* check = app.add_subcommand("check", "Parse an algebra and report idempotence and size");
    check->add_option("algebra", alg_path)->required();
    check->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            err << "algebra " << a.name() << ": " << a.size() << " elements, " << a.operation_count()
                << " operations\n";
            for (const auto& op : a.operations()) err << "  " << op.name() << " arity " << op.arity() << '\n';
            out << "RESULT ok size=" << a.size() << " idempotent=" << (a.idempotent() ? "yes" : "no")
                << " norm=" << size_norm(a) << '\n';
            return success;
        };
    });

    auto* mcirc = app.add_subcommand("maltsev-circuit", "Decide a Maltsev term and write a witness circuit");
    mcirc->add_option("algebra", alg_path)->required();
    mcirc->add_option("-o,--output", out_path, "Circuit file")->required();
    budget.attach(mcirc);
    auto* mtable = app.add_subcommand("maltsev-table", "Decide a Maltsev term and write its table");
    mtable->add_option("algebra", alg_path)->required();
    mtable->add_option("-o,--output", out_path, "Algebra file")->required();
    budget.attach(mtable);
    auto maltsev_action = [&](bool table) {
        action = [&, table] {
            const Algebra a = load_algebra(alg_path);
            MaltsevOptions options;
            options.budget = budget.budget();
            options.threads = thread_cap();
            options.compute_table = table;
            const auto outcome = build_maltsev_circuit(a, options);
            if (const auto* none = std::get_if<NoMaltsev>(&outcome)) {
                const auto& q = none->witness;
                err << a.name() << " has no Maltsev term: (" << int(q.a) << "," << int(q.d)
                    << ") is not generated by (" << int(q.a) << "," << int(q.c) << "), (" << int(q.b) << ","
                    << int(q.c) << "), (" << int(q.b) << "," << int(q.d) << ")\n";
                out << "RESULT no quadruple=" << int(q.a) << ',' << int(q.b) << ',' << int(q.c) << ','
                    << int(q.d) << '\n';
                return negative;
            }
            const auto& found = std::get<MaltsevFound>(outcome);
            if (table) {
                const auto values = found.table->values();
                save_algebra(Algebra(a.name() + "_maltsev", a.size(),
                                     {OperationTable("maltsev", a.size(), 3,
                                                     std::vector<Element>(values.begin(), values.end()))}),
                             out_path);
                err << "Maltsev table of " << a.name() << " written\n";
                out << "RESULT yes table=" << out_path << '\n';
            } else {
                save_circuit(found.circuit, out_path);
                err << "Maltsev circuit of " << a.name() << " with " << found.circuit.size() << " nodes written\n";
                out << "RESULT yes witness=" << out_path << " size=" << found.circuit.size() << '\n';
            }
            return success;
        };
    };
    mcirc->callback([&] { maltsev_action(false); });
    mtable->callback([&] { maltsev_action(true); });

    auto* mdecide = app.add_subcommand("minority-decide", "Decide a minority term by subpower closure");
    mdecide->add_option("algebra", alg_path)->required();
    mdecide->add_option("-o,--output", out_path, "Witness circuit file (default <algebra>.minority.circ)");
    mdecide->add_flag("--no-reduce", no_reduce, "Keep constant coordinates");
    budget.attach(mdecide);
    mdecide->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const auto outcome = decide_minority_bruteforce(a, budget.budget(), !no_reduce);
            const std::string path = out_path.empty() ? sibling_path(alg_path, ".minority.circ") : out_path;
            return report_decision(outcome, a, path, "minority", out, err);
        };
    });

    auto* mcheck = app.add_subcommand("minority-check-witness", "Check that a circuit is a minority term");
    mcheck->add_option("algebra", alg_path)->required();
    mcheck->add_option("circuit", circ_path)->required();
    mcheck->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const Circuit c = load_circuit(circ_path);
            if (c.input_count() != 3 || c.outputs().size() != 1) {
                throw UsageError("a minority witness is a single-output ternary circuit");
            }
            const auto table = evaluate_all(c, a).front();
            if (auto v = minority_violation(table)) {
                err << "not a minority term: " << *v << '\n';
                out << "RESULT no\n";
                return negative;
            }
            err << "minority equations hold on all of " << a.name() << '\n';
            out << "RESULT yes\n";
            return success;
        };
    });

    auto* mmdecide = app.add_subcommand("minmaj-decide", "Decide a minority-majority term by subpower closure");
    mmdecide->add_option("algebra", alg_path)->required();
    mmdecide->add_option("-o,--output", out_path, "Witness circuit file (default <algebra>.minmaj.circ)");
    budget.attach(mmdecide);
    mmdecide->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const auto outcome = decide_minmaj_bruteforce(a, budget.budget());
            const std::string path = out_path.empty() ? sibling_path(alg_path, ".minmaj.circ") : out_path;
            return report_decision(outcome, a, path, "minority-majority", out, err);
        };
    });

    auto* export_cmd = app.add_subcommand("smp-export", "Write the membership instance for minority terms");
    export_cmd->add_option("algebra", alg_path)->required();
    export_cmd->add_option("-o,--output", out_path, "Instance file")->required();
    export_cmd->add_flag("--no-reduce", no_reduce, "Keep constant coordinates");
    export_cmd->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const SmpInstance inst = build_min_instance(a, !no_reduce && a.idempotent());
            save_smp(inst, out_path);
            err << "instance " << inst.name << " with " << inst.generators.size() << " generators written\n";
            out << "RESULT ok dim=" << inst.dimension << '\n';
            return success;
        };
    });

    auto* solve = app.add_subcommand("smp-solve", "Decide a subpower membership instance");
    solve->add_option("algebra", alg_path)->required();
    solve->add_option("instance", smp_path)->required();
    solve->add_option("-o,--output", out_path, "Write a witness circuit here when the answer is yes");
    budget.attach(solve);
    solve->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const SmpInstance inst = load_smp(smp_path);
            validate_smp(inst, a.size());
            const auto res = solve_smp(a, inst, budget.budget());
            switch (res.answer) {
            case Membership::yes: {
                std::string suffix;
                if (!out_path.empty()) {
                    const std::size_t t = *res.generation.target_index();
                    save_circuit(from_derivation(res.generation.derivation(), a, std::span(&t, 1), inst.name),
                                 out_path);
                    suffix = " witness=" + out_path;
                }
                err << "target generated after " << res.generation.size() << " elements\n";
                out << "RESULT yes" << suffix << '\n';
                return success;
            }
            case Membership::no:
                err << "closure of " << res.generation.size() << " elements misses the target\n";
                out << "RESULT no\n";
                return negative;
            case Membership::exhausted:
                err << "budget exhausted after " << res.generation.size() << " elements\n";
                out << "RESULT exhausted\n";
                return inconclusive;
            }
            return inconclusive;
        };
    });

    auto* reduce = app.add_subcommand("reduce-smpun", "Reduce the minority question to membership over an algebra with a Maltsev operation");
    reduce->add_option("algebra", alg_path)->required();
    reduce->add_option("-o,--output", out_path, "Output directory")->required();
    budget.attach(reduce);
    reduce->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const auto r = reduce_to_smpun(a, budget.budget());
            fs::create_directories(out_path);
            const std::string alg_out = (fs::path(out_path) / "augmented.alg").string();
            const std::string smp_out = (fs::path(out_path) / "instance.smp").string();
            save_algebra(r.algebra, alg_out);
            save_smp(r.instance, smp_out);
            err << (r.fixed_no ? "no Maltsev term; wrote the fixed no-instance\n"
                               : "wrote the algebra with its Maltsev operation and the instance\n");
            out << "RESULT ok fixed_no=" << (r.fixed_no ? "yes" : "no") << " algebra=" << alg_out
                << " instance=" << smp_out << '\n';
            return success;
        };
    });

    auto* an_gen = app.add_subcommand("an-gen", "Write the algebra A_n");
    an_gen->add_option("n", an_n)->required()->check(CLI::Range(3, 64));
    an_gen->add_option("-o,--output", out_path, "Algebra file")->required();
    an_gen->callback([&] {
        action = [&] {
            save_algebra(build_An(an_n), out_path);
            err << "A" << an_n << " has " << 4 * an_n << " elements and " << an_n << " operations\n";
            out << "RESULT ok algebra=" << out_path << '\n';
            return success;
        };
    });

    auto* an_verify = app.add_subcommand("an-verify", "Check the properties of A_n");
    an_verify->add_option("n", an_n)->required()->check(CLI::Range(3, 21));
    an_verify->add_option("--samples", samples, "Sampled triples from R")->check(CLI::PositiveNumber);
    an_verify->add_option("--seed", seed, "Random seed")->check(CLI::PositiveNumber);
    an_verify->add_option("--budget-elems", an_budget, "Element budget for the closure")
        ->check(CLI::PositiveNumber);
    an_verify->add_option("--subset-cap", subset_cap, "Largest exhaustive subset count")
        ->check(CLI::PositiveNumber);
    an_verify->callback([&] {
        action = [&] {
            const Algebra a = build_An(an_n);
            std::vector<VerificationReport> reports;

            VerificationReport maltsev{.name = "t_i-maltsev"};
            for (const auto& op : a.operations()) {
                ++maltsev.checked;
                if (!is_maltsev_table(op)) {
                    ++maltsev.failures;
                    if (!maltsev.counterexample) maltsev.counterexample = op.name() + " is not Maltsev";
                }
            }
            maltsev.pass = maltsev.failures == 0 && a.idempotent();
            reports.push_back(std::move(maltsev));

            reports.push_back(observation_report());
            reports.push_back(verify_local_minority(an_n, subset_cap, seed));

            const auto w = witness_tuples(an_n);
            VerificationReport witnesses{.name = "witness-tuples", .checked = 4};
            witnesses.pass = in_R(an_n, w.v1) && in_R(an_n, w.v2) && in_R(an_n, w.v3) && !in_R(an_n, w.v0);
            if (!witnesses.pass) witnesses.failures = 1;
            reports.push_back(std::move(witnesses));

            reports.push_back(verify_R_preservation(an_n, samples, seed, thread_cap()));
            Budget b;
            b.max_elements = an_budget;
            reports.push_back(verify_no_minority_evidence(an_n, b));

            bool pass = true, heuristic = false;
            for (const auto& r : reports) {
                err << r.name << ": " << r.verdict() << " (" << r.checked << " checked, " << r.failures
                    << " failures)\n";
                for (const auto& note : r.notes) err << "  " << note << '\n';
                if (r.counterexample) err << "  first failure: " << *r.counterexample << '\n';
                out << "CHECK " << r.name << ' ' << r.verdict() << " checked=" << r.checked
                    << " failures=" << r.failures << '\n';
                pass = pass && r.pass;
                heuristic = heuristic || r.heuristic;
            }
            if (!pass) {
                out << "VERDICT fail\n";
                return negative;
            }
            out << "VERDICT " << (heuristic ? "heuristic-pass" : "pass") << '\n';
            return heuristic ? inconclusive : success;
        };
    });

    auto* eval = app.add_subcommand("circuit-eval", "Evaluate a circuit at one input tuple");
    eval->add_option("algebra", alg_path)->required();
    eval->add_option("circuit", circ_path)->required();
    eval->add_option("input", tuple_text, "Comma-separated elements, e.g. 0,1,1")->required();
    eval->callback([&] {
        action = [&] {
            const Algebra a = load_algebra(alg_path);
            const Circuit c = load_circuit(circ_path);
            const Tuple input = parse_tuple(tuple_text);
            out << "RESULT " << join(evaluate(c, a, input)) << '\n';
            return success;
        };
    });

    auto* inl = app.add_subcommand("circuit-inline", "Inline derived symbols defined by other circuit files");
    inl->add_option("circuit", circ_path)->required();
    inl->add_option("definitions", definition_paths, "Circuit files; each defines the symbol named like the circuit");
    inl->add_option("-o,--output", out_path, "Output circuit file")->required();
    inl->callback([&] {
        action = [&] {
            SignatureExtension ext;
            for (const auto& path : definition_paths) {
                Circuit def = load_circuit(path);
                const std::string name = def.name();
                ext.define(name, std::move(def));
            }
            const Circuit result = inline_derived(load_circuit(circ_path), ext);
            save_circuit(result, out_path);
            err << "inlined circuit has " << result.size() << " nodes\n";
            out << "RESULT ok size=" << result.size() << '\n';
            return success;
        };
    });

    auto* term = app.add_subcommand("circuit-to-term", "Print the expanded term of a circuit output");
    term->add_option("circuit", circ_path)->required();
    term->add_option("--budget", term_budget, "Largest term size to print")->check(CLI::PositiveNumber);
    term->add_option("--output-index", output_index, "Which output to expand");
    term->callback([&] {
        action = [&] {
            const Circuit c = load_circuit(circ_path);
            if (output_index >= c.outputs().size()) throw UsageError("output index out of range");
            const Circuit single = c.with_outputs({c.outputs()[output_index]});
            if (auto s = circuit_to_term_string(single, term_budget)) {
                out << "RESULT " << *s << '\n';
                return success;
            }
            err << "term has " << expanded_term_size(single) << " occurrences, above the budget\n";
            out << "RESULT exhausted\n";
            return inconclusive;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage_error;
    }

    try {
        return action();
    } catch (const BudgetExhausted& e) {
        err << "budget exhausted: " << e.what() << '\n';
        out << "RESULT exhausted\n";
        return inconclusive;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
}

} // namespace malcev::cli
