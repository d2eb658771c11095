#include <trapdoor/semantic/summary.hpp>

#include <algorithm>
#include <deque>
#include <functional>

namespace trapdoor::semantic {

namespace {

bool is_callable(const Node& n) {
    return n.kind == NodeKind::Function || n.kind == NodeKind::Modifier;
}

bool is_end_node(const Node& n) {
    return n.kind == NodeKind::Require || n.kind == NodeKind::Assert ||
           n.kind == NodeKind::Revert || n.kind == NodeKind::Return;
}

bool is_public(const Node& fn) {
    return fn.kind == NodeKind::Function &&
           (fn.visibility == Visibility::Public || fn.visibility == Visibility::External) &&
           fn.name != "constructor";
}

void walk(const ContractAst& ast, NodeId root, const std::function<void(const Node&)>& visit) {
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const Node& n = ast.at(stack.back());
        stack.pop_back();
        visit(n);
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
}

std::vector<NodeId> params_of(const ContractAst& ast, const Node& callable) {
    std::vector<NodeId> out;
    for (NodeId c : callable.children) {
        if (ast.at(c).kind == NodeKind::Parameter) out.push_back(c);
    }
    return out;
}

/// Base declaration of an assignment target: `x`, `m[k]`, `m[k][j]`.
std::optional<NodeId> written_decl(const ContractAst& ast, NodeId lhs) {
    const Node* n = &ast.at(lhs);
    while (n->kind == NodeKind::BinaryOp && n->name == "[]" && !n->children.empty()) {
        n = &ast.at(n->children.front());
    }
    if (n->kind == NodeKind::Identifier && n->refs) return *n->refs;
    return std::nullopt;
}

bool is_guard_expr(const SemanticSummary& s, NodeId expr) {
    const auto& ast = *s.ast;
    bool found = false;
    auto has_sender = [](const std::set<VarKey>& r) {
        return std::any_of(r.begin(), r.end(),
                           [](const VarKey& k) { return k.kind == VarKey::Kind::Sender; });
    };
    auto has_state_of = [&](const std::set<VarKey>& r, std::initializer_list<TypeTag> tags) {
        for (const auto& k : r) {
            if (k.kind != VarKey::Kind::Decl) continue;
            const auto& d = ast.at(k.id);
            if (d.kind != NodeKind::StateVar) continue;
            if (std::find(tags.begin(), tags.end(), d.type_tag) != tags.end()) return true;
        }
        return false;
    };
    walk(ast, expr, [&](const Node& n) {
        if (found || n.kind != NodeKind::BinaryOp || n.children.size() != 2) return;
        const auto lhs = s.reads(n.children[0]);
        const auto rhs = s.reads(n.children[1]);
        if (n.name == "==" || n.name == "!=") {
            found = (has_sender(lhs) && has_state_of(rhs, {TypeTag::Address})) ||
                    (has_sender(rhs) && has_state_of(lhs, {TypeTag::Address}));
        } else if (n.name == "[]") {
            found = has_sender(rhs) &&
                    has_state_of(lhs, {TypeTag::AddressList, TypeTag::Mapping});
        }
    });
    return found;
}

} // namespace

bool is_entry_function(const Node& n) {
    return n.kind == NodeKind::Function && (n.name == "transfer" || n.name == "transferFrom");
}

std::set<VarKey> SemanticSummary::dep(const VarKey& key) const {
    if (auto it = closure.find(key); it != closure.end()) return it->second;
    return {key};
}

std::optional<NodeId> SemanticSummary::callable_of(NodeId node) const {
    std::optional<NodeId> cur = node;
    while (cur) {
        if (is_callable(ast->at(*cur))) return cur;
        cur = ast->parent(*cur);
    }
    return std::nullopt;
}

std::set<VarKey> SemanticSummary::reads(NodeId expr) const {
    std::set<VarKey> out;
    std::function<void(NodeId)> go = [&](NodeId id) {
        const Node& n = ast->at(id);
        switch (n.kind) {
        case NodeKind::Identifier:
            if (n.refs) {
                const auto k = ast->at(*n.refs).kind;
                if (k == NodeKind::StateVar || k == NodeKind::Parameter) {
                    out.insert({VarKey::Kind::Decl, *n.refs});
                }
            }
            return;
        case NodeKind::Literal:
            return;
        case NodeKind::MemberAccess:
            if (n.name == "msg.sender") {
                if (auto c = callable_of(id)) out.insert({VarKey::Kind::Sender, *c});
                return;
            }
            break;
        case NodeKind::Call:
            if (n.refs && ast->at(*n.refs).kind == NodeKind::Function) {
                out.insert({VarKey::Kind::Return, *n.refs});
                return;
            }
            break;
        case NodeKind::LowLevelCall:
            out.insert({VarKey::Kind::CallResult, id});
            if (auto it = llc_targets.find(id); it != llc_targets.end()) {
                out.insert({VarKey::Kind::Return, it->second});
            }
            return;
        default:
            break;
        }
        for (NodeId c : n.children) go(c);
    };
    go(expr);
    return out;
}

std::vector<std::pair<int, NodeId>> SemanticSummary::end_conditions(NodeId end_node,
                                                                     int max_distance) const {
    std::vector<std::pair<int, NodeId>> out;
    const Node& e = ast->at(end_node);
    int d = 1;
    if ((e.kind == NodeKind::Require || e.kind == NodeKind::Assert) && !e.children.empty()) {
        if (d <= max_distance) out.emplace_back(d, e.children.front());
        ++d;
    }
    NodeId child = end_node;
    for (auto p = ast->parent(end_node); p && d <= max_distance; child = *p, p = ast->parent(*p)) {
        const Node& pn = ast->at(*p);
        if (is_callable(pn)) break;
        if (pn.kind == NodeKind::If && !pn.children.empty() && pn.children.front() != child) {
            out.emplace_back(d++, pn.children.front());
        }
    }
    return out;
}

bool SemanticSummary::is_mutable(NodeId state_var) const {
    auto it = mutators.find(state_var);
    return it != mutators.end() &&
           (!it->second.backdoors.empty() || !it->second.external_calls.empty());
}

std::string SemanticSummary::name_of(NodeId id) const { return ast->at(id).name; }

SemanticSummary summarize(const ContractAst& ast) {
    return summarize(std::make_shared<const ContractAst>(ast));
}

SemanticSummary summarize(std::shared_ptr<const ContractAst> ast_ptr) {
    SemanticSummary s;
    s.ast = std::move(ast_ptr);
    const ContractAst& ast = *s.ast;

    // Merge external contracts that are present in the document.
    for (const auto& n : ast.nodes) {
        if (n.kind == NodeKind::LowLevelCall) s.C.insert(n.id);
        if (n.kind != NodeKind::LowLevelCall) continue;
        const auto dot = n.name.rfind('.');
        bool merged = false;
        if (dot != std::string::npos) {
            const auto cname = n.name.substr(0, dot);
            const auto fname = n.name.substr(dot + 1);
            for (const auto& c : ast.contracts) {
                if (c.name != cname) continue;
                for (NodeId id : c.node_ids) {
                    const auto& f = ast.at(id);
                    if (f.kind == NodeKind::Function && f.name == fname) {
                        s.llc_targets[n.id] = id;
                        merged = true;
                        break;
                    }
                }
                if (merged) break;
            }
        }
        if (!merged) s.notes.push_back("external call " + n.name + " has no source; treated as opaque");
    }

    // Callees per callable.
    std::map<NodeId, std::set<NodeId>> callees;
    std::map<NodeId, std::set<NodeId>> internal_callees;
    std::vector<NodeId> callables;
    for (const auto& n : ast.nodes) {
        if (!is_callable(n)) continue;
        callables.push_back(n.id);
        auto& out = callees[n.id];
        auto& internal = internal_callees[n.id];
        walk(ast, n.id, [&](const Node& m) {
            if (m.kind == NodeKind::Call && m.refs && is_callable(ast.at(*m.refs))) {
                out.insert(*m.refs);
                internal.insert(*m.refs);
            } else if (m.kind == NodeKind::LowLevelCall) {
                if (auto it = s.llc_targets.find(m.id); it != s.llc_targets.end()) {
                    out.insert(it->second);
                }
            }
        });
    }
    auto reach = [&](NodeId start, const std::map<NodeId, std::set<NodeId>>& edges) {
        std::set<NodeId> seen{start};
        std::deque<NodeId> q{start};
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop_front();
            auto it = edges.find(v);
            if (it == edges.end()) continue;
            for (NodeId w : it->second) {
                if (seen.insert(w).second) q.push_back(w);
            }
        }
        return seen;
    };

    // Data flow.
    auto bind_args = [&](const Node& call_node, NodeId target) {
        const auto params = params_of(ast, ast.at(target));
        for (std::size_t i = 0; i < call_node.children.size() && i < params.size(); ++i) {
            for (const auto& r : s.reads(call_node.children[i])) {
                s.flow[r].insert({VarKey::Kind::Decl, params[i]});
            }
        }
    };
    for (const auto& n : ast.nodes) {
        switch (n.kind) {
        case NodeKind::Assignment:
            if (n.children.size() == 2) {
                const auto& lhs = ast.at(n.children[0]);
                if (lhs.kind == NodeKind::Identifier && lhs.refs) {
                    for (const auto& r : s.reads(n.children[1])) {
                        s.flow[r].insert({VarKey::Kind::Decl, *lhs.refs});
                    }
                }
            }
            break;
        case NodeKind::Parameter:
        case NodeKind::StateVar:
            if (!n.children.empty()) {
                for (const auto& r : s.reads(n.children.front())) {
                    s.flow[r].insert({VarKey::Kind::Decl, n.id});
                }
            }
            break;
        case NodeKind::Call:
            if (n.refs && is_callable(ast.at(*n.refs))) bind_args(n, *n.refs);
            break;
        case NodeKind::LowLevelCall:
            if (auto it = s.llc_targets.find(n.id); it != s.llc_targets.end()) {
                bind_args(n, it->second);
            }
            break;
        case NodeKind::Return:
            if (!n.children.empty()) {
                if (auto c = s.callable_of(n.id); c && ast.at(*c).kind == NodeKind::Function) {
                    for (const auto& r : s.reads(n.children.front())) {
                        s.flow[r].insert({VarKey::Kind::Return, *c});
                    }
                }
            }
            break;
        default:
            break;
        }
    }
    auto close = [&](const VarKey& root) {
        std::set<VarKey> seen{root};
        std::deque<VarKey> q{root};
        while (!q.empty()) {
            auto v = q.front();
            q.pop_front();
            auto it = s.flow.find(v);
            if (it == s.flow.end()) continue;
            for (const auto& w : it->second) {
                if (seen.insert(w).second) q.push_back(w);
            }
        }
        return seen;
    };
    for (const auto& [src, _] : s.flow) s.closure[src] = close(src);

    // I and F.
    std::set<NodeId> entries;
    for (const auto& n : ast.nodes) {
        if (!is_entry_function(n)) continue;
        entries.insert(n.id);
        const auto p = params_of(ast, n);
        auto decl = [&](std::size_t i) { return VarKey{VarKey::Kind::Decl, p[i]}; };
        if (n.name == "transfer" && p.size() >= 2) {
            s.i_s.roots.insert({VarKey::Kind::Sender, n.id});
            s.i_r.roots.insert(decl(0));
            s.i_a.roots.insert(decl(1));
        } else if (n.name == "transferFrom" && p.size() >= 3) {
            s.i_s.roots.insert(decl(0));
            s.i_r.roots.insert(decl(1));
            s.i_a.roots.insert(decl(2));
        }
    }
    for (auto* in : {&s.i_s, &s.i_r, &s.i_a}) {
        for (const auto& r : in->roots) {
            const auto d = s.dep(r);
            in->dependants.insert(d.begin(), d.end());
        }
    }
    for (NodeId e : entries) {
        const auto r = reach(e, callees);
        s.F.insert(r.begin(), r.end());
    }
    for (NodeId f : s.F) {
        s.call_graph.nodes.push_back(f);
        for (NodeId g : callees[f]) {
            if (s.F.count(g)) s.call_graph.add_edge(f, g);
        }
    }
    s.call_graph.normalize();

    for (const auto& n : ast.nodes) {
        if (!is_end_node(n)) continue;
        if (auto c = s.callable_of(n.id); c && s.F.count(*c)) s.N.insert(n.id);
    }

    // S.
    for (const auto& n : ast.nodes) {
        if (n.kind != NodeKind::StateVar) continue;
        StateVarInfo info{n.id, n.name, ast.contracts[ast.contract_of(n.id)].name, n.type_tag,
                          s.dep({VarKey::Kind::Decl, n.id})};
        if (n.constant) {
            s.s_c.push_back(std::move(info));
            continue;
        }
        switch (n.type_tag) {
        case TypeTag::Address:
        case TypeTag::AddressList: s.s_a.push_back(std::move(info)); break;
        case TypeTag::Int:
        case TypeTag::Uint: s.s_i.push_back(std::move(info)); break;
        case TypeTag::Bool: s.s_b.push_back(std::move(info)); break;
        default: break;
        }
    }

    // B: public functions with a caller guard in themselves or anything they call.
    std::map<NodeId, bool> self_guarded;
    for (NodeId c : callables) {
        bool guarded = false;
        walk(ast, c, [&](const Node& m) {
            if (guarded || !is_end_node(m) || m.kind == NodeKind::Return) return;
            for (const auto& [d, cond] : s.end_conditions(m.id, 1)) {
                if (is_guard_expr(s, cond)) guarded = true;
            }
        });
        self_guarded[c] = guarded;
    }
    std::map<NodeId, std::set<NodeId>> writes;
    for (NodeId c : callables) {
        walk(ast, c, [&](const Node& m) {
            if (m.kind != NodeKind::Assignment || m.children.size() != 2) return;
            auto target = written_decl(ast, m.children[0]);
            if (!target || ast.at(*target).kind != NodeKind::StateVar) return;
            writes[c].insert(*target);
            for (const auto& r : s.reads(m.children[1])) {
                if (r.kind == VarKey::Kind::CallResult) {
                    s.mutators[*target].external_calls.push_back(r.id);
                }
            }
        });
    }
    for (const auto& n : ast.nodes) {
        if (n.kind != NodeKind::Function) continue;
        const bool ctor = n.name == "constructor";
        if (!ctor && !is_public(n)) continue;
        const auto r = reach(n.id, internal_callees);
        const bool guarded = !ctor && !is_entry_function(n) &&
                             std::any_of(r.begin(), r.end(),
                                         [&](NodeId c) { return self_guarded[c]; });
        if (guarded) s.B.insert(n.id);
        for (NodeId c : r) {
            for (NodeId v : writes[c]) {
                auto& m = s.mutators[v];
                if (ctor) {
                    m.constructor_writes = true;
                } else if (guarded) {
                    if (std::find(m.backdoors.begin(), m.backdoors.end(), n.name) ==
                        m.backdoors.end()) {
                        m.backdoors.push_back(n.name);
                    }
                } else {
                    m.open_writes = true;
                }
            }
        }
    }
    for (auto& [_, m] : s.mutators) {
        std::sort(m.backdoors.begin(), m.backdoors.end());
        std::sort(m.external_calls.begin(), m.external_calls.end());
        m.external_calls.erase(std::unique(m.external_calls.begin(), m.external_calls.end()),
                               m.external_calls.end());
    }
    for (const auto& n : ast.nodes) {
        if (n.external && n.kind == NodeKind::Identifier) {
            s.notes.push_back("identifier " + n.name + " (node " + std::to_string(n.id) +
                              ") is external");
        }
    }
    return s;
}

nlohmann::json to_json(const SemanticSummary& s) {
    auto vars = [](const std::vector<StateVarInfo>& v) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& x : v) out.push_back(x.contract + "." + x.name);
        return out;
    };
    auto names = [&](const std::set<NodeId>& ids) {
        nlohmann::json out = nlohmann::json::array();
        for (NodeId id : ids) out.push_back(s.name_of(id));
        return out;
    };
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : s.call_graph.edges) edges.push_back({s.name_of(a), s.name_of(b)});
    return {{"S",
             {{"s_a", vars(s.s_a)}, {"s_i", vars(s.s_i)}, {"s_b", vars(s.s_b)}, {"s_c", vars(s.s_c)}}},
            {"F", names(s.F)},
            {"N", s.N},
            {"B", names(s.B)},
            {"C", s.C},
            {"call_graph", edges},
            {"notes", s.notes}};
}

} // namespace trapdoor::semantic
