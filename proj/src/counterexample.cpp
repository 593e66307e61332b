#include "malcev/counterexample.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <sstream>
#include <thread>

#include "malcev/minority.hpp"

namespace malcev {

namespace {

void check_n(std::size_t n) {
    if (n <= 2) throw AlgebraError("A_n needs n > 2");
    if (4 * n > max_universe_size) throw AlgebraError("A_n is too large for the element type");
}

std::string show_tuple(std::size_t n, const Tuple& t) {
    std::ostringstream out;
    out << '[';
    for (std::size_t j = 0; j < t.size(); ++j) {
        const auto e = decode_An(n, t[j]);
        out << (j ? " " : "") << '(' << e.i << ',' << e.b << ')';
    }
    out << ']';
    return out.str();
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays exact; bail out on overflow.
        if (r > UINT64_MAX / (n - k + i)) return UINT64_MAX;
        r = r * (n - k + i) / i;
    }
    return r;
}

Tuple block_tuple(std::size_t n, std::array<unsigned, 3> blocks) {
    Tuple t(3 * n);
    for (std::size_t j = 0; j < 3 * n; ++j) t[j] = encode_An(n, {j % n + 1, blocks[j / n]});
    return t;
}

// One chunk of the R-preservation run; seeded from (seed, chunk).
struct ChunkResult {
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;
    std::optional<std::string> counterexample;
};

constexpr std::uint64_t chunk_size = 1 << 16;

} // namespace

Element encode_An(std::size_t n, AnElement e) {
    if (e.i < 1 || e.i > n || e.b > 3) throw AlgebraError("A_n element out of range");
    return static_cast<Element>(4 * (e.i - 1) + e.b);
}

AnElement decode_An(std::size_t n, Element e) {
    if (e >= 4 * n) throw AlgebraError("A_n element out of range");
    return {std::size_t(e / 4) + 1, unsigned(e % 4)};
}

OperationTable minority_on_range(std::size_t n) {
    if (n == 0) throw AlgebraError("range must be nonempty");
    return make_table("m", n, 3, [](std::span<const Element> a) {
        if (a[1] == a[2]) return a[0];
        if (a[0] == a[2]) return a[1];
        return a[2];
    });
}

Algebra build_An(std::size_t n) {
    check_n(n);
    const auto m = minority_on_range(n);
    std::vector<OperationTable> ops;
    for (std::size_t i = 1; i <= n; ++i) {
        ops.push_back(make_table("t" + std::to_string(i), 4 * n, 3, [&](std::span<const Element> args) {
            const auto x = decode_An(n, args[0]), y = decode_An(n, args[1]), z = decode_An(n, args[2]);
            if (x.i == i && y.i == i && z.i == i) return encode_An(n, {i, (x.b + 4 - y.b + z.b) % 4});
            const Element firsts[3] = {Element(x.i - 1), Element(y.i - 1), Element(z.i - 1)};
            return encode_An(n, {std::size_t(m.at(firsts)) + 1, x.b ^ y.b ^ z.b});
        }));
    }
    return Algebra("A" + std::to_string(n), 4 * n, std::move(ops));
}

std::string VerificationReport::verdict() const {
    if (!pass) return "fail";
    return heuristic ? "heuristic-pass" : "pass";
}

VerificationReport observation_report() {
    VerificationReport report{.name = "observation"};
    auto diff = [](unsigned x, unsigned y, unsigned z) { return ((x ^ y ^ z) + 8 - (x + 4 - y + z) % 4) % 4; };
    for (unsigned x = 0; x < 4; ++x) {
        for (unsigned y = 0; y < 4; ++y) {
            for (unsigned z = 0; z < 4; ++z) {
                ++report.checked;
                const unsigned d = diff(x, y, z);
                const bool ok = (d == 0 || d == 2) && d == diff(x % 2, y % 2, z % 2);
                if (!ok) {
                    ++report.failures;
                    if (!report.counterexample) {
                        report.counterexample = "(" + std::to_string(x) + "," + std::to_string(y) + "," +
                                                std::to_string(z) + ") gives difference " + std::to_string(d);
                    }
                }
            }
        }
    }
    report.pass = report.failures == 0;
    return report;
}

bool verify_observation() { return observation_report().pass; }

VerificationReport verify_local_minority(std::size_t n, std::uint64_t subset_cap, std::uint64_t seed) {
    const Algebra algebra = build_An(n);
    const std::size_t size = 4 * n, k = n - 1;
    VerificationReport report{.name = "local-minority"};

    auto check_subset = [&](const std::vector<Element>& subset) {
        std::vector<bool> used(n, false);
        for (Element e : subset) used[e / 4] = true;
        const std::size_t i = std::find(used.begin(), used.end(), false) - used.begin();
        const OperationTable& t = algebra.operation(i);
        ++report.checked;
        for (Element x : subset) {
            for (Element y : subset) {
                const Element yxx[3] = {y, x, x}, xyx[3] = {x, y, x}, xxy[3] = {x, x, y};
                if (t.at(yxx) != y || t.at(xyx) != y || t.at(xxy) != y) {
                    ++report.failures;
                    if (!report.counterexample) {
                        report.counterexample = t.name() + " fails on " + std::to_string(x) + "," + std::to_string(y);
                    }
                    return;
                }
            }
        }
    };

    const std::uint64_t total = binomial(size, k);
    std::vector<Element> subset(k);
    if (total <= subset_cap) {
        std::vector<bool> mask(size, false);
        std::fill(mask.begin(), mask.begin() + k, true);
        do {
            subset.clear();
            for (std::size_t e = 0; e < size; ++e) {
                if (mask[e]) subset.push_back(static_cast<Element>(e));
            }
            check_subset(subset);
        } while (std::prev_permutation(mask.begin(), mask.end()));
        report.notes.push_back("exhaustive over " + std::to_string(total) + " subsets");
    } else {
        std::mt19937_64 rng(seed);
        std::vector<Element> universe(size);
        for (std::size_t e = 0; e < size; ++e) universe[e] = static_cast<Element>(e);
        for (std::uint64_t s = 0; s < subset_cap; ++s) {
            subset.clear();
            std::sample(universe.begin(), universe.end(), std::back_inserter(subset), k, rng);
            check_subset(subset);
        }
        report.notes.push_back("sampled " + std::to_string(subset_cap) + " of " + std::to_string(total) +
                               " subsets");
    }
    report.pass = report.failures == 0;
    return report;
}

bool in_R(std::size_t n, const Tuple& t) {
    if (t.size() != 3 * n) return false;
    unsigned sum = 0;
    for (std::size_t j = 0; j < 3 * n; ++j) {
        if (t[j] >= 4 * n || t[j] / 4 != j % n) return false;
        const unsigned b = t[j] % 4;
        if (b % 2 != t[j - j % n] % 2) return false;
        sum += b;
    }
    return sum % 4 == 2;
}

std::uint64_t R_size(std::size_t n) {
    if (3 * n - 1 >= 64) throw AlgebraError("|R| does not fit in 64 bits");
    std::uint64_t parities = 0;
    for (unsigned p = 0; p < 8; ++p) {
        const unsigned ones = (p & 1) + (p >> 1 & 1) + (p >> 2 & 1);
        if ((n * ones) % 2 == 0) ++parities;
    }
    return parities << (3 * n - 1);
}

WitnessTuples witness_tuples(std::size_t n) {
    check_n(n);
    return {block_tuple(n, {0, 1, 1}), block_tuple(n, {1, 0, 1}), block_tuple(n, {1, 1, 0}),
            block_tuple(n, {0, 0, 0})};
}

RSampler::RSampler(std::size_t n, std::uint64_t seed) : n_(n), rng_(seed) { check_n(n); }

Tuple RSampler::draw() {
    Tuple t(3 * n_);
    while (true) {
        ++attempts_;
        // Bits 0..2 are block parities, bits 3.. the high bits while they last.
        const auto bits = rng_();
        unsigned sum = 0;
        for (std::size_t j = 0; j < 3 * n_; ++j) {
            const unsigned parity = bits >> (j / n_) & 1;
            const unsigned high = 3 + j < 64 ? bits >> (3 + j) & 1 : rng_() >> 63;
            const unsigned b = parity + 2 * high;
            sum += b;
            t[j] = static_cast<Element>(4 * (j % n_) + b);
        }
        if (sum % 4 == 2) {
            ++accepted_;
            return t;
        }
    }
}

VerificationReport verify_R_preservation(std::size_t n, std::uint64_t samples, std::uint64_t seed,
                                         unsigned threads) {
    const Algebra algebra = build_An(n);
    const std::uint64_t chunks = (samples + chunk_size - 1) / chunk_size;

    auto run_chunk = [&](std::uint64_t c) {
        ChunkResult r;
        std::seed_seq seq{seed, c};
        std::uint64_t chunk_seed;
        seq.generate(reinterpret_cast<std::uint32_t*>(&chunk_seed),
                     reinterpret_cast<std::uint32_t*>(&chunk_seed) + 2);
        RSampler sampler(n, chunk_seed);
        const std::uint64_t count = std::min(chunk_size, samples - c * chunk_size);
        std::vector<Tuple> triple(3);
        for (std::uint64_t s = 0; s < count; ++s) {
            for (auto& t : triple) t = sampler.draw();
            for (std::size_t op = 0; op < algebra.operation_count(); ++op) {
                ++r.checked;
                Tuple out = apply_pointwise(algebra, op, triple);
                if (!in_R(n, out)) {
                    ++r.failures;
                    if (!r.counterexample) {
                        r.counterexample = algebra.operation(op).name() + " maps " + show_tuple(n, triple[0]) +
                                           ", " + show_tuple(n, triple[1]) + ", " + show_tuple(n, triple[2]) +
                                           " to " + show_tuple(n, out);
                    }
                }
            }
        }
        r.attempts = sampler.attempts();
        r.accepted = sampler.accepted();
        return r;
    };

    std::vector<ChunkResult> results(chunks);
    threads = std::max(1u, std::min<unsigned>(threads, chunks));
    if (threads == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) results[c] = run_chunk(c);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::uint64_t c = w; c < chunks; c += threads) results[c] = run_chunk(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    VerificationReport report{.name = "R-preservation"};
    std::uint64_t attempts = 0, accepted = 0;
    for (auto& r : results) {
        report.checked += r.checked;
        report.failures += r.failures;
        attempts += r.attempts;
        accepted += r.accepted;
        if (!report.counterexample && r.counterexample) report.counterexample = r.counterexample;
    }
    report.pass = report.failures == 0;
    report.heuristic = n % 2 == 0;
    std::ostringstream rate;
    rate << "sampler accepted " << accepted << " of " << attempts << " draws";
    report.notes.push_back(rate.str());
    if (report.heuristic) report.notes.push_back("even n: R is only known to be a subuniverse for odd n");
    return report;
}

VerificationReport verify_no_minority_evidence(std::size_t n, const Budget& budget) {
    const Algebra algebra = build_An(n);
    const auto w = witness_tuples(n);
    VerificationReport report{.name = "no-minority-evidence"};
    auto fail = [&](std::string why) {
        ++report.failures;
        if (!report.counterexample) report.counterexample = std::move(why);
    };

    if (in_R(n, w.v0)) fail("v0 lies in R");
    for (const auto* v : {&w.v1, &w.v2, &w.v3}) {
        if (!in_R(n, *v)) fail("a witness tuple lies outside R");
    }
    for (std::size_t j = 0; j < 3 * n; ++j) {
        if (minority_of(w.v1[j], w.v2[j], w.v3[j]) != w.v0[j]) fail("v0 is not the minority of v1, v2, v3");
    }

    const std::vector<Tuple> gens = {w.v1, w.v2, w.v3};
    const auto gen = generate(algebra, 3 * n, gens, w.v0, budget);
    if (gen.target_index()) fail("v0 was generated");
    for (std::size_t e = 0; e < gen.size(); ++e) {
        ++report.checked;
        const Tuple t = gen.element(e);
        if (!in_R(n, t)) fail("generated element " + show_tuple(n, t) + " lies outside R");
    }
    if (gen.size() > R_size(n)) fail("closure larger than R");

    report.notes.push_back("closure " + std::string(gen.closed() ? "closed" : "stopped") + " at " +
                           std::to_string(gen.size()) + " elements; |R| = " + std::to_string(R_size(n)));
    report.pass = report.failures == 0;
    report.heuristic = n % 2 == 0;
    if (report.heuristic) report.notes.push_back("even n: R is only known to be a subuniverse for odd n");
    return report;
}

} // namespace malcev
