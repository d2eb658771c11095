#pragma once

#include <trapdoor/semantic/ast.hpp>

#include <utility>
#include <vector>

namespace trapdoor::semantic {

struct CallGraph {
    std::vector<NodeId> nodes;                          // sorted, unique
    std::vector<std::pair<NodeId, NodeId>> edges;       // sorted, unique

    void add_edge(NodeId from, NodeId to);
    void normalize();
};

/// Strongly connected components with more than one node, plus single nodes
/// carrying a self-loop. Each set is sorted; the list is sorted.
std::vector<std::vector<NodeId>> find_cycles(const CallGraph& graph);

} // namespace trapdoor::semantic
