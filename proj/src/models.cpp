#include "rwre/models.hpp"

#include <stdexcept>

namespace rwre {

RootedEnvironment make_env(const ModelSpec& spec, std::uint64_t master_seed,
                           std::uint64_t replica) {
    const std::uint64_t stream = derive_stream(master_seed, spec.name, replica);
    if (spec.name == "lattice") return gen_lattice(spec.d, spec.L, false);
    if (spec.name == "torus") return gen_lattice(spec.d, spec.L, true, spec.side);
    if (spec.name == "percolation") return gen_percolation(spec.d, spec.L, spec.p, stream);
    if (spec.name == "conductance")
        return gen_random_conductance(spec.d, spec.L, spec.alpha, stream);
    if (spec.name == "balanced") return gen_balanced(spec.d, spec.L, stream);
    if (spec.name == "sierpinski") return gen_sierpinski(spec.level);
    if (spec.name == "kesten") return gen_kesten_tree(spec.offspring_pmf, spec.depth, stream);
    throw std::invalid_argument("unknown model '" + spec.name + "'");
}

} // namespace rwre
