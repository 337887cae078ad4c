#ifndef HGMM_SERIALIZATION_HPP
#define HGMM_SERIALIZATION_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hgmm/hierarchy.hpp"

namespace hgmm {

class TreeFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON tree document. Doubles are written as shortest round-trip decimals,
/// so parse(serialize(t)) reproduces every field bit for bit and
/// serialize(parse(doc)) == doc for documents produced here.
std::string serialize_tree(const Dendrogram& tree);

/// Throws TreeFormatError on malformed documents.
Dendrogram parse_tree(const std::string& document);

Dendrogram load_tree_file(const std::string& path);
void save_tree_file(const std::string& path, const Dendrogram& tree);

/// Graphviz rendering: one vertex per node labeled with id, attached count
/// and alpha; one edge per parent-child link.
std::string tree_to_dot(const Dendrogram& tree);

}  // namespace hgmm

#endif  // HGMM_SERIALIZATION_HPP
