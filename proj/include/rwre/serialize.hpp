#pragma once

#include "rwre/environment.hpp"

#include <iosfwd>
#include <string>

namespace rwre {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-based text format:
//   env v=1 model=<name> d=<int> L=<int> seed=<u64> params=<k=v,...> root=<id>
//   v <id> <c1> ... <cd>
//   e <i> <j> <weight>      (reversible; each undirected edge once, i <= j)
//   a <i> <j> <prob>        (general kernel arcs)
// Probabilities and weights printed with 17 significant digits.
void serialize(const RootedEnvironment& env, std::ostream& out);
void serialize_to_file(const RootedEnvironment& env, const std::string& path);

RootedEnvironment deserialize(std::istream& in);
RootedEnvironment deserialize_file(const std::string& path);

} // namespace rwre
