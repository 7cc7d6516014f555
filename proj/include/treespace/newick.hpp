#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treespace/tree.hpp"

namespace treespace {

class NewickError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Leaves must be labelled 0..r. Every edge needs a length; a length on the
// root is ignored. Contracted zero-length interior edges are reported in
// `warnings` when given.
Tree parse_newick(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Canonical form rooted at leaf 0, children ordered by smallest leaf label,
// lengths printed with the shortest round-trip representation.
std::string write_newick(const Tree& t);

std::string format_number(double v);

}  // namespace treespace
