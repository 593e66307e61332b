// Subpower membership instances and their text format:
//
//   smp <name>
//   dim <d>
//   gen <d integers>        (one line per generator)
//   target <d integers>
//   coord <i> <label>       (optional, 0-based coordinate index)

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/subpower.hpp"

namespace malcev {

struct SmpInstance {
    std::string name;
    std::size_t dimension = 0;
    std::vector<Tuple> generators;
    Tuple target;
    std::vector<std::pair<std::size_t, std::string>> coordinate_labels;

    bool operator==(const SmpInstance&) const = default;
};

/// Throws AlgebraError unless every tuple has the declared dimension and
/// (when `universe_size` is nonzero) every entry is in range.
void validate_smp(const SmpInstance& instance, std::size_t universe_size = 0);

SmpInstance parse_smp(std::string_view text);
std::string serialize_smp(const SmpInstance& instance);
SmpInstance load_smp(const std::string& path);
void save_smp(const SmpInstance& instance, const std::string& path);

MemberResult solve_smp(const Algebra& algebra, const SmpInstance& instance, const Budget& budget = {});

} // namespace malcev
