// Growth table for the Maltsev pipeline: circuit size and wall time per |A|.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "malcev/counterexample.hpp"
#include "malcev/maltsev.hpp"

using namespace malcev;

namespace {

Algebra cyclic_group(std::size_t n) {
    return Algebra("Z" + std::to_string(n), n,
                   {make_table("p", n, 3, [n](std::span<const Element> a) { return (a[0] + n - a[1] + a[2]) % n; })});
}

} // namespace

int main() {
    std::vector<Algebra> algebras = {cyclic_group(2), cyclic_group(4), cyclic_group(8), build_An(3)};
    std::printf("%-6s %4s %12s %12s %10s\n", "algebra", "n", "size", "size/n^6", "seconds");
    std::size_t previous = 0;
    bool monotone = true;
    for (const auto& a : algebras) {
        const auto start = std::chrono::steady_clock::now();
        const auto outcome = build_maltsev_circuit(a);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto* found = std::get_if<MaltsevFound>(&outcome);
        if (!found) {
            std::printf("%-6s: no Maltsev term\n", a.name().c_str());
            return EXIT_FAILURE;
        }
        const std::size_t size = found->circuit.size();
        std::printf("%-6s %4zu %12zu %12.4f %10.3f\n", a.name().c_str(), a.size(), size,
                    double(size) / std::pow(double(a.size()), 6), seconds);
        monotone = monotone && size >= previous;
        previous = size;
    }
    std::printf("sizes %s in |A|\n", monotone ? "nondecreasing" : "NOT monotone");
    return monotone ? EXIT_SUCCESS : EXIT_FAILURE;
}
