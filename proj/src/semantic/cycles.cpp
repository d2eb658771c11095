#include <trapdoor/semantic/cycles.hpp>

#include <algorithm>
#include <map>

namespace trapdoor::semantic {

void CallGraph::add_edge(NodeId from, NodeId to) {
    nodes.push_back(from);
    nodes.push_back(to);
    edges.emplace_back(from, to);
}

void CallGraph::normalize() {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::vector<std::vector<NodeId>> find_cycles(const CallGraph& graph) {
    // Iterative Tarjan over a dense renumbering.
    std::vector<NodeId> ids = graph.nodes;
    for (const auto& [a, b] : graph.edges) {
        ids.push_back(a);
        ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::map<NodeId, std::size_t> dense;
    for (std::size_t i = 0; i < ids.size(); ++i) dense[ids[i]] = i;

    const std::size_t n = ids.size();
    std::vector<std::vector<std::size_t>> adj(n);
    std::vector<bool> self_loop(n, false);
    for (const auto& [a, b] : graph.edges) {
        adj[dense[a]].push_back(dense[b]);
        if (a == b) self_loop[dense[a]] = true;
    }

    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    std::vector<std::vector<NodeId>> out;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!work.empty()) {
            auto& [v, next] = work.back();
            if (next < adj[v].size()) {
                std::size_t w = adj[v][next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    work.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
            if (low[done] != index[done]) continue;
            std::vector<NodeId> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(ids[w]);
            } while (w != done);
            if (comp.size() > 1 || self_loop[done]) {
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace trapdoor::semantic
