#include "malcev/smp.hpp"

#include <sstream>

#include "text_io.hpp"

namespace malcev {

void validate_smp(const SmpInstance& instance, std::size_t universe_size) {
    if (instance.dimension == 0) throw AlgebraError("smp instance '" + instance.name + "' has dimension 0");
    if (instance.generators.empty()) throw AlgebraError("smp instance '" + instance.name + "' has no generators");
    auto check = [&](const Tuple& t, const char* what) {
        if (t.size() != instance.dimension) {
            throw AlgebraError(std::string("smp ") + what + " has dimension " + std::to_string(t.size()) +
                               ", expected " + std::to_string(instance.dimension));
        }
        if (universe_size == 0) return;
        for (Element a : t) {
            if (a >= universe_size) throw AlgebraError(std::string("smp ") + what + " entry out of range");
        }
    };
    for (const auto& g : instance.generators) check(g, "generator");
    check(instance.target, "target");
    for (const auto& [coord, label] : instance.coordinate_labels) {
        if (coord >= instance.dimension) throw AlgebraError("smp coordinate label index out of range");
        if (label.empty()) throw AlgebraError("smp coordinate label is empty");
    }
}

SmpInstance parse_smp(std::string_view text) {
    detail::TokenStream<AlgebraError> in(text, "smp");
    SmpInstance inst;
    in.expect("smp");
    inst.name = in.next("instance name");
    in.expect("dim");
    const std::size_t dim_line = in.line_of_next();
    inst.dimension = in.next_uint("dimension");
    if (inst.dimension == 0) in.fail(dim_line, "dimension must be positive");

    auto read_tuple = [&](const char* what) {
        Tuple t;
        for (std::size_t j = 0; j < inst.dimension; ++j) {
            const std::size_t line = in.line_of_next();
            std::uint64_t v = in.next_uint(what);
            if (v >= max_universe_size) in.fail(line, "element " + std::to_string(v) + " is too large");
            t.push_back(static_cast<Element>(v));
        }
        return t;
    };

    bool have_target = false;
    while (!in.done()) {
        const std::size_t line = in.line_of_next();
        std::string keyword = in.next("keyword");
        if (keyword == "gen") {
            if (have_target) in.fail(line, "generators must precede the target");
            inst.generators.push_back(read_tuple("generator entry"));
        } else if (keyword == "target") {
            if (have_target) in.fail(line, "duplicate target");
            inst.target = read_tuple("target entry");
            have_target = true;
        } else if (keyword == "coord") {
            std::uint64_t i = in.next_uint("coordinate index");
            if (i >= inst.dimension) in.fail(line, "coordinate index out of range");
            inst.coordinate_labels.emplace_back(i, in.next("coordinate label"));
        } else {
            in.fail(line, "unexpected '" + keyword + "'");
        }
        if (!in.done() && in.line_of_next() == line) in.fail(line, "trailing tokens");
    }
    if (inst.generators.empty()) in.fail(dim_line, "no generators");
    if (!have_target) in.fail(dim_line, "no target");
    return inst;
}

std::string serialize_smp(const SmpInstance& instance) {
    std::ostringstream out;
    auto write = [&](const char* keyword, const Tuple& t) {
        out << keyword;
        for (Element a : t) out << ' ' << static_cast<unsigned>(a);
        out << '\n';
    };
    out << "smp " << instance.name << "\n";
    out << "dim " << instance.dimension << "\n";
    for (const auto& g : instance.generators) write("gen", g);
    write("target", instance.target);
    for (const auto& [coord, label] : instance.coordinate_labels) {
        out << "coord " << coord << ' ' << label << '\n';
    }
    return out.str();
}

SmpInstance load_smp(const std::string& path) {
    return parse_smp(detail::read_file<AlgebraError>(path));
}

void save_smp(const SmpInstance& instance, const std::string& path) {
    detail::write_file<AlgebraError>(path, serialize_smp(instance));
}

MemberResult solve_smp(const Algebra& algebra, const SmpInstance& instance, const Budget& budget) {
    validate_smp(instance, algebra.size());
    return member(algebra, instance.generators, instance.target, budget);
}

} // namespace malcev
