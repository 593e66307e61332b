// Provenance of elements produced by subpower generation.
//
// Elements are numbered in discovery order. The first generator_count()
// elements are the distinct generators; every later element is the result of
// one basic operation applied to earlier elements.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace malcev {

class Derivation {
public:
    struct Step {
        std::size_t op;
        std::span<const std::uint32_t> parents;
    };

    Derivation() = default;

    /// `generator_inputs[e]` is the position, in the caller's generator list,
    /// of the first generator equal to element e. `input_count` is the length
    /// of that list (duplicates included).
    Derivation(std::size_t input_count, std::vector<std::uint32_t> generator_inputs)
        : input_count_(input_count), generator_inputs_(std::move(generator_inputs)) {
        for (auto in : generator_inputs_) {
            if (in >= input_count_) throw std::invalid_argument("generator input out of range");
        }
    }

    std::size_t input_count() const { return input_count_; }
    std::size_t generator_count() const { return generator_inputs_.size(); }
    std::size_t step_count() const { return ops_.size(); }
    std::size_t element_count() const { return generator_count() + step_count(); }

    std::size_t input_of_generator(std::size_t element) const { return generator_inputs_.at(element); }
    bool is_generator(std::size_t element) const { return element < generator_count(); }

    Step step(std::size_t s) const {
        return {ops_.at(s), std::span<const std::uint32_t>(parents_).subspan(
                                offsets_[s], offsets_[s + 1] - offsets_[s])};
    }
    /// The step that produced a non-generator element.
    Step producer(std::size_t element) const { return step(element - generator_count()); }

    void add_step(std::size_t op, std::span<const std::uint32_t> parents) {
        const std::size_t next = element_count();
        for (auto p : parents) {
            if (p >= next) throw std::invalid_argument("derivation step references a later element");
        }
        ops_.push_back(op);
        parents_.insert(parents_.end(), parents.begin(), parents.end());
        offsets_.push_back(parents_.size());
    }

    bool operator==(const Derivation&) const = default;

private:
    std::size_t input_count_ = 0;
    std::vector<std::uint32_t> generator_inputs_;
    std::vector<std::size_t> ops_;
    std::vector<std::uint32_t> parents_;
    std::vector<std::size_t> offsets_{0};
};

} // namespace malcev
