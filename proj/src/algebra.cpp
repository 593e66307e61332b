#include "malcev/algebra.hpp"

#include <limits>
#include <sstream>

#include "text_io.hpp"

namespace malcev {

std::uint64_t checked_power(std::uint64_t n, std::size_t k) {
    std::uint64_t result = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (n != 0 && result > std::numeric_limits<std::uint64_t>::max() / n) {
            throw AlgebraError("size " + std::to_string(n) + "^" + std::to_string(k) +
                               " overflows 64 bits");
        }
        result *= n;
    }
    return result;
}

OperationTable::OperationTable(std::string name, std::size_t universe_size, std::size_t arity,
                               std::vector<Element> values)
    : name_(std::move(name)), n_(universe_size), arity_(arity), values_(std::move(values)) {
    if (name_.empty()) throw AlgebraError("operation name must not be empty");
    if (arity_ == 0) throw AlgebraError("operation '" + name_ + "': nullary operations are not allowed");
    if (n_ == 0 || n_ > max_universe_size) {
        throw AlgebraError("operation '" + name_ + "': universe size out of range");
    }
    const std::uint64_t expected = checked_power(n_, arity_);
    if (values_.size() != expected) {
        throw AlgebraError("operation '" + name_ + "': table has " + std::to_string(values_.size()) +
                           " entries, expected " + std::to_string(expected));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] >= n_) {
            throw AlgebraError("operation '" + name_ + "': entry " + std::to_string(i) +
                               " is out of range");
        }
    }
}

Algebra::Algebra(std::string name, std::size_t size, std::vector<OperationTable> operations)
    : name_(std::move(name)), size_(size), operations_(std::move(operations)) {
    if (size_ == 0 || size_ > max_universe_size) {
        throw AlgebraError("universe size must be in 1.." + std::to_string(max_universe_size));
    }
    if (operations_.empty()) throw AlgebraError("an algebra needs at least one operation");
    for (const auto& op : operations_) {
        if (op.universe_size() != size_) {
            throw AlgebraError("operation '" + op.name() + "' is sized for a different universe");
        }
    }
    for (std::size_t i = 0; i < operations_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (operations_[i].name() == operations_[j].name()) {
                throw AlgebraError("duplicate operation name '" + operations_[i].name() + "'");
            }
        }
    }
    idempotent_ = is_idempotent(*this);
}

std::size_t Algebra::find_operation(std::string_view name) const {
    for (std::size_t i = 0; i < operations_.size(); ++i) {
        if (operations_[i].name() == name) return i;
    }
    return operations_.size();
}

Algebra Algebra::with_operation(OperationTable extra) const {
    auto ops = operations_;
    ops.push_back(std::move(extra));
    return Algebra(name_, size_, std::move(ops));
}

Algebra parse_algebra(std::string_view text) {
    detail::TokenStream<AlgebraError> in(text, "algebra");
    in.expect("algebra");
    std::string name = in.next("algebra name");
    in.expect("size");
    std::size_t size_line = in.line_of_next();
    std::uint64_t n = in.next_uint("size");
    if (n == 0 || n > max_universe_size) {
        in.fail(size_line, "size must be in 1.." + std::to_string(max_universe_size));
    }
    std::vector<OperationTable> ops;
    while (!in.done()) {
        std::size_t op_line = in.line_of_next();
        in.expect("op");
        std::string op_name = in.next("operation name");
        std::uint64_t arity = in.next_uint("arity");
        if (arity == 0) in.fail(op_line, "operation '" + op_name + "': nullary operations are not allowed");
        std::uint64_t count = 0;
        try {
            count = checked_power(n, arity);
        } catch (const AlgebraError& e) {
            in.fail(op_line, e.what());
        }
        std::vector<Element> values;
        values.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            if (in.done() || in.peek().text == "op") {
                in.fail(in.line_of_next(), "operation '" + op_name + "': table has " +
                                               std::to_string(i) + " entries, expected " +
                                               std::to_string(count));
            }
            std::size_t line = in.line_of_next();
            std::uint64_t v = in.next_uint("table entry");
            if (v >= n) {
                in.fail(line, "value " + std::to_string(v) + " out of range for size " + std::to_string(n));
            }
            values.push_back(static_cast<Element>(v));
        }
        if (!in.done() && in.peek().text != "op") {
            in.fail(in.line_of_next(), "operation '" + op_name + "': too many table entries");
        }
        ops.emplace_back(std::move(op_name), n, arity, std::move(values));
    }
    if (ops.empty()) in.fail(size_line, "an algebra needs at least one operation");
    return Algebra(std::move(name), n, std::move(ops));
}

std::string serialize_algebra(const Algebra& algebra) {
    std::ostringstream out;
    const std::size_t n = algebra.size();
    out << "algebra " << algebra.name() << "\n";
    out << "size " << n << "\n";
    for (const auto& op : algebra.operations()) {
        out << "op " << op.name() << " " << op.arity() << "\n";
        auto values = op.values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << static_cast<unsigned>(values[i]);
            out << ((i + 1) % n == 0 ? '\n' : ' ');
        }
    }
    return out.str();
}

Algebra load_algebra(const std::string& path) {
    return parse_algebra(detail::read_file<AlgebraError>(path));
}

void save_algebra(const Algebra& algebra, const std::string& path) {
    detail::write_file<AlgebraError>(path, serialize_algebra(algebra));
}

Element apply(const Algebra& algebra, std::size_t op, std::span<const Element> args) {
    if (op >= algebra.operation_count()) throw AlgebraError("operation index out of range");
    const auto& table = algebra.operation(op);
    if (args.size() != table.arity()) {
        throw AlgebraError("operation '" + table.name() + "' expects " + std::to_string(table.arity()) +
                           " arguments, got " + std::to_string(args.size()));
    }
    for (Element a : args) {
        if (a >= algebra.size()) throw AlgebraError("element out of range");
    }
    return table.at(args);
}

Tuple apply_pointwise(const Algebra& algebra, std::size_t op, std::span<const Tuple> tuples) {
    if (op >= algebra.operation_count()) throw AlgebraError("operation index out of range");
    const auto& table = algebra.operation(op);
    if (tuples.size() != table.arity()) {
        throw AlgebraError("operation '" + table.name() + "' expects " + std::to_string(table.arity()) +
                           " tuples, got " + std::to_string(tuples.size()));
    }
    const std::size_t d = tuples.front().size();
    for (const auto& t : tuples) {
        if (t.size() != d) throw AlgebraError("tuples have different dimensions");
        for (Element a : t) {
            if (a >= algebra.size()) throw AlgebraError("element out of range");
        }
    }
    Tuple result(d);
    Tuple column(tuples.size());
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < tuples.size(); ++i) column[i] = tuples[i][j];
        result[j] = table.at(column);
    }
    return result;
}

bool is_idempotent(const OperationTable& table) {
    const std::size_t n = table.universe_size();
    Tuple args(table.arity());
    for (std::size_t a = 0; a < n; ++a) {
        std::fill(args.begin(), args.end(), static_cast<Element>(a));
        if (table.at(args) != a) return false;
    }
    return true;
}

bool is_idempotent(const Algebra& algebra) {
    for (const auto& op : algebra.operations()) {
        if (!is_idempotent(op)) return false;
    }
    return true;
}

std::uint64_t size_norm(const Algebra& algebra) {
    std::uint64_t total = 0;
    for (const auto& op : algebra.operations()) total += op.values().size();
    return total;
}

} // namespace malcev
