#include "malcev/subpower.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_map>

namespace malcev {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

std::uint64_t fingerprint(const Element* data, std::size_t len) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ len;
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        std::uint64_t w;
        std::memcpy(&w, data + i, 8);
        h = (h ^ mix(w)) * 0x100000001b3ULL;
        h = (h << 29) | (h >> 35);
    }
    std::uint64_t tail = 0;
    for (std::size_t s = 0; i < len; ++i, s += 8) tail |= std::uint64_t(data[i]) << s;
    return mix(h ^ mix(tail + 1));
}

// Writes op(rows[0][j], ..., rows[m-1][j]) for every coordinate j.
void apply_rows(const OperationTable& op, std::span<const Element* const> rows, std::size_t d,
                Element* out) {
    const std::size_t n = op.universe_size();
    const Element* table = op.values().data();
    switch (rows.size()) {
    case 1: {
        const Element* a = rows[0];
        for (std::size_t j = 0; j < d; ++j) out[j] = table[a[j]];
        break;
    }
    case 2: {
        const Element *a = rows[0], *b = rows[1];
        for (std::size_t j = 0; j < d; ++j) out[j] = table[a[j] * n + b[j]];
        break;
    }
    case 3: {
        const Element *a = rows[0], *b = rows[1], *c = rows[2];
        const std::size_t n2 = n * n;
        for (std::size_t j = 0; j < d; ++j) out[j] = table[a[j] * n2 + b[j] * n + c[j]];
        break;
    }
    default:
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t idx = 0;
            for (const Element* r : rows) idx = idx * n + r[j];
            out[j] = table[idx];
        }
    }
}

} // namespace

class ClosureEngine {
public:
    ClosureEngine(const Algebra& algebra, std::size_t dimension, const Budget& budget)
        : result_(algebra, dimension), budget_(budget), d_(dimension), n_(algebra.size()) {
        try {
            checked_power(n_, d_);
            packed_ = true;
        } catch (const AlgebraError&) {
            packed_ = false;
        }
        scratch_.resize(d_);
        verify_.resize(d_);
    }

    GenerationResult run(std::span<const Tuple> generators, const std::optional<Tuple>& target) {
        if (generators.empty()) throw AlgebraError("generation needs at least one generator");
        for (const auto& g : generators) check_tuple(g);
        if (target) check_tuple(*target);
        target_ = target ? target->data() : nullptr;

        std::vector<std::uint32_t> generator_inputs;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            const Element* g = generators[i].data();
            std::uint64_t key = key_of(g);
            if (find(g, key)) continue;
            generator_inputs.push_back(static_cast<std::uint32_t>(i));
            insert(g, key, true);
        }
        result_.derivation_ = Derivation(generators.size(), std::move(generator_inputs));
        if (target_) {
            for (std::size_t e = 0; e < keys_.size(); ++e) {
                if (std::memcmp(stored_row(e), target_, d_) == 0) {
                    return finish(GenerationStatus::target_found, e);
                }
            }
        }

        const Algebra& algebra = result_.algebra_;
        std::vector<std::size_t> idx;
        std::vector<const Element*> rows;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            materialize_through(i);
            for (std::size_t op = 0; op < algebra.operation_count(); ++op) {
                const OperationTable& table = algebra.operation(op);
                const std::size_t m = table.arity();
                idx.assign(m, 0);
                idx[m - 1] = i;
                rows.resize(m);
                while (true) {
                    if (result_.applications_ >= budget_.max_applications) {
                        return finish(GenerationStatus::exhausted);
                    }
                    ++result_.applications_;
                    for (std::size_t p = 0; p < m; ++p) rows[p] = stored_row(idx[p]);
                    apply_rows(table, rows, d_, scratch_.data());
                    const std::uint64_t key = key_of(scratch_.data());
                    if (!find(scratch_.data(), key)) {
                        const bool is_target = target_ && std::memcmp(scratch_.data(), target_, d_) == 0;
                        if (!is_target && keys_.size() >= budget_.max_elements) {
                            return finish(GenerationStatus::exhausted);
                        }
                        std::vector<std::uint32_t> parents(idx.begin(), idx.end());
                        result_.derivation_.add_step(op, parents);
                        insert(scratch_.data(), key);
                        if (is_target) return finish(GenerationStatus::target_found, keys_.size() - 1);
                    }
                    if (!advance(idx, i)) break;
                }
            }
        }
        return finish(GenerationStatus::closed);
    }

private:
    void check_tuple(const Tuple& t) const {
        if (t.size() != d_) {
            throw AlgebraError("tuple of dimension " + std::to_string(t.size()) + ", expected " +
                               std::to_string(d_));
        }
        for (Element a : t) {
            if (a >= n_) throw AlgebraError("tuple entry out of range");
        }
    }

    // Next tuple over [0..i]^m in lexicographic order that mentions i.
    static bool advance(std::vector<std::size_t>& idx, std::size_t i) {
        const std::size_t m = idx.size();
        std::size_t pos = m;
        while (pos > 0) {
            --pos;
            if (idx[pos] < i) {
                ++idx[pos];
                std::fill(idx.begin() + pos + 1, idx.end(), 0);
                if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx[m - 1] = i;
                return true;
            }
        }
        return false;
    }

    std::uint64_t key_of(const Element* t) const {
        if (!packed_) return fingerprint(t, d_);
        std::uint64_t key = 0;
        for (std::size_t j = 0; j < d_; ++j) key = key * n_ + t[j];
        return key;
    }

    std::size_t materialized() const { return result_.stored_.size() / (d_ == 0 ? 1 : d_); }

    const Element* stored_row(std::size_t e) const { return result_.stored_.data() + e * d_; }

    // Recomputes element e from its step; its parents are always materialized.
    const Element* element_bytes(std::size_t e, Element* buffer) const {
        if (e < materialized()) return stored_row(e);
        auto step = result_.derivation_.producer(e);
        std::vector<const Element*> rows;
        for (auto p : step.parents) rows.push_back(stored_row(p));
        apply_rows(result_.algebra_.operation(step.op), rows, d_, buffer);
        return buffer;
    }

    void materialize_through(std::size_t i) {
        while (materialized() <= i) {
            const std::size_t e = materialized();
            const Element* bytes = element_bytes(e, verify_.data());
            result_.stored_.insert(result_.stored_.end(), bytes, bytes + d_);
        }
    }

    bool find(const Element* t, std::uint64_t key) {
        auto it = first_with_key_.find(key);
        if (it == first_with_key_.end()) return false;
        if (packed_) return true;
        for (std::uint32_t e = it->second; e != none; e = next_same_key_[e]) {
            if (std::memcmp(element_bytes(e, verify_.data()), t, d_) == 0) return true;
        }
        return false;
    }

    // Generators are always kept; the lazy path recomputes only derived elements.
    void insert(const Element* t, std::uint64_t key, bool keep = false) {
        const auto e = static_cast<std::uint32_t>(keys_.size());
        keys_.push_back(key);
        auto [it, fresh] = first_with_key_.try_emplace(key, e);
        if (!packed_) next_same_key_.push_back(fresh ? none : it->second);
        if (!fresh) it->second = e;
        const bool eager = materialized() == e &&
                           (keep || (result_.stored_.size() + d_) <= budget_.materialize_bytes);
        if (eager) result_.stored_.insert(result_.stored_.end(), t, t + d_);
    }

    GenerationResult finish(GenerationStatus status, std::optional<std::size_t> target = std::nullopt) {
        result_.status_ = status;
        result_.target_index_ = target;
        return std::move(result_);
    }

    static constexpr std::uint32_t none = 0xffffffffu;

    GenerationResult result_;
    Budget budget_;
    std::size_t d_;
    std::size_t n_;
    bool packed_ = false;
    const Element* target_ = nullptr;
    std::vector<std::uint64_t> keys_;
    std::unordered_map<std::uint64_t, std::uint32_t> first_with_key_;
    std::vector<std::uint32_t> next_same_key_;
    Tuple scratch_;
    Tuple verify_;
};

Tuple GenerationResult::element(std::size_t i) const {
    if (i >= size()) throw AlgebraError("element index out of range");
    const std::size_t kept = dimension_ == 0 ? size() : stored_.size() / dimension_;
    if (i < kept) return Tuple(stored_.begin() + i * dimension_, stored_.begin() + (i + 1) * dimension_);
    auto step = derivation_.producer(i);
    std::vector<Tuple> parents;
    for (auto p : step.parents) parents.push_back(element(p));
    return apply_pointwise(algebra_, step.op, parents);
}

std::vector<Tuple> GenerationResult::elements() const {
    std::vector<Tuple> all;
    all.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) all.push_back(element(i));
    return all;
}

GenerationResult generate(const Algebra& algebra, std::size_t dimension,
                          std::span<const Tuple> generators, const std::optional<Tuple>& target,
                          const Budget& budget) {
    if (dimension == 0) throw AlgebraError("dimension must be positive");
    ClosureEngine engine(algebra, dimension, budget);
    return engine.run(generators, target);
}

MemberResult member(const Algebra& algebra, std::span<const Tuple> generators, const Tuple& target,
                    const Budget& budget) {
    auto gen = generate(algebra, target.size(), generators, target, budget);
    Membership answer = Membership::no;
    if (gen.target_index()) {
        answer = Membership::yes;
    } else if (gen.exhausted()) {
        answer = Membership::exhausted;
    }
    return {answer, std::move(gen)};
}

std::set<Tuple> naive_fixpoint_oracle(const Algebra& algebra, std::size_t dimension,
                                      std::span<const Tuple> generators, std::uint64_t cap) {
    std::uint64_t space = 0;
    try {
        space = checked_power(algebra.size(), dimension);
    } catch (const AlgebraError&) {
        throw AlgebraError("oracle instance exceeds its cap");
    }
    if (space > cap) throw AlgebraError("oracle instance exceeds its cap");
    std::set<Tuple> closure;
    for (const auto& g : generators) {
        if (g.size() != dimension) throw AlgebraError("generator has the wrong dimension");
        closure.insert(g);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        const std::vector<Tuple> current(closure.begin(), closure.end());
        for (std::size_t op = 0; op < algebra.operation_count(); ++op) {
            const std::size_t m = algebra.operation(op).arity();
            std::vector<std::size_t> idx(m, 0);
            std::vector<Tuple> args(m);
            while (true) {
                for (std::size_t p = 0; p < m; ++p) args[p] = current[idx[p]];
                if (closure.insert(apply_pointwise(algebra, op, args)).second) changed = true;
                std::size_t pos = m;
                while (pos > 0 && ++idx[pos - 1] == current.size()) idx[--pos] = 0;
                if (pos == 0) break;
            }
        }
    }
    return closure;
}

} // namespace malcev
