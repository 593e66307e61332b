// Finite algebras given by operation tables.
//
// Elements of an n-element algebra are the integers 0..n-1. A k-ary table
// stores n^k entries in row-major order with the leftmost argument most
// significant, so f(a_1,...,a_k) lives at index sum a_i * n^(k-i).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace malcev {

using Element = std::uint8_t;
using Tuple = std::vector<Element>;

/// Largest supported universe; elements must fit in an Element.
inline constexpr std::size_t max_universe_size = 256;

class AlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Returns n^k, throwing AlgebraError when it does not fit in 64 bits.
std::uint64_t checked_power(std::uint64_t n, std::size_t k);

class OperationTable {
public:
    OperationTable(std::string name, std::size_t universe_size, std::size_t arity,
                   std::vector<Element> values);

    const std::string& name() const { return name_; }
    std::size_t arity() const { return arity_; }
    std::size_t universe_size() const { return n_; }
    std::span<const Element> values() const { return values_; }

    /// Row-major position of an argument tuple. No range checks.
    std::size_t index_of(std::span<const Element> args) const {
        std::size_t idx = 0;
        for (Element a : args) idx = idx * n_ + a;
        return idx;
    }
    Element at(std::span<const Element> args) const { return values_[index_of(args)]; }
    Element at_index(std::size_t idx) const { return values_[idx]; }

    bool operator==(const OperationTable&) const = default;

private:
    std::string name_;
    std::size_t n_;
    std::size_t arity_;
    std::vector<Element> values_;
};

/// Builds a table by calling f on every argument tuple in row-major order.
template <typename F>
OperationTable make_table(std::string name, std::size_t n, std::size_t arity, F&& f) {
    const std::uint64_t count = checked_power(n, arity);
    std::vector<Element> values(count);
    Tuple args(arity, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        values[idx] = static_cast<Element>(f(std::span<const Element>(args)));
        for (std::size_t pos = arity; pos-- > 0;) {
            if (++args[pos] < n) break;
            args[pos] = 0;
        }
    }
    return OperationTable(std::move(name), n, arity, std::move(values));
}

class Algebra {
public:
    Algebra(std::string name, std::size_t size, std::vector<OperationTable> operations);

    const std::string& name() const { return name_; }
    std::size_t size() const { return size_; }
    const std::vector<OperationTable>& operations() const { return operations_; }
    const OperationTable& operation(std::size_t op) const { return operations_.at(op); }
    std::size_t operation_count() const { return operations_.size(); }

    /// Index of the operation with the given name, or operation_count() when absent.
    std::size_t find_operation(std::string_view name) const;

    /// Computed once at construction.
    bool idempotent() const { return idempotent_; }

    /// Returns a copy with `extra` appended as a new basic operation.
    Algebra with_operation(OperationTable extra) const;

    bool operator==(const Algebra& other) const {
        return name_ == other.name_ && size_ == other.size_ && operations_ == other.operations_;
    }

private:
    std::string name_;
    std::size_t size_;
    std::vector<OperationTable> operations_;
    bool idempotent_ = false;
};

Algebra parse_algebra(std::string_view text);
std::string serialize_algebra(const Algebra& algebra);

Algebra load_algebra(const std::string& path);
void save_algebra(const Algebra& algebra, const std::string& path);

/// Checked application of a basic operation.
Element apply(const Algebra& algebra, std::size_t op, std::span<const Element> args);

/// Coordinatewise application: result[j] = op(tuples[0][j], ..., tuples[k-1][j]).
Tuple apply_pointwise(const Algebra& algebra, std::size_t op, std::span<const Tuple> tuples);

bool is_idempotent(const Algebra& algebra);
bool is_idempotent(const OperationTable& table);

/// Sum over operations of n^arity.
std::uint64_t size_norm(const Algebra& algebra);

} // namespace malcev
