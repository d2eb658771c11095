#include <trapdoor/semantic/indicators.hpp>

#include <algorithm>
#include <array>
#include <functional>

namespace trapdoor::semantic {

namespace {

constexpr std::array<std::string_view, 5> kCategoryNames{"EP", "ES", "AL", "FM", "IC"};
constexpr std::array<std::string_view, 3> kViaNames{"backdoor", "external_call",
                                                    "constructor_only"};

bool intersects(const std::set<VarKey>& a, const std::set<VarKey>& b) {
    const auto& small = a.size() < b.size() ? a : b;
    const auto& large = a.size() < b.size() ? b : a;
    return std::any_of(small.begin(), small.end(),
                       [&](const VarKey& k) { return large.count(k) != 0; });
}

struct Relation {
    std::string op;
    std::set<VarKey> lhs;
    std::set<VarKey> rhs;
};

bool is_comparison(std::string_view op) {
    return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

class Detector {
public:
    Detector(const SemanticSummary& s, const DetectorConfig& cfg) : s_(s), cfg_(cfg) {}

    std::vector<Indicator> run() {
        std::set<VarKey> senders_and_receivers = s_.i_s.dependants;
        senders_and_receivers.insert(s_.i_r.dependants.begin(), s_.i_r.dependants.end());

        for (NodeId e : s_.N) {
            const auto near = s_.end_conditions(e, 1);
            const auto far = s_.end_conditions(e, std::max(1, cfg_.switch_distance));

            for (const auto& v : s_.s_a) {
                if (!related(near, v.dependants, senders_and_receivers, true)) continue;
                if (auto m = mutation(v.decl)) {
                    add(Category::EP, v.name, e, *m);
                } else if (constructor_only(v)) {
                    add(Category::EP, v.name, e, {"constructor", Via::constructor_only});
                }
            }
            for (const auto& v : s_.s_i) {
                if (!related(near, v.dependants, s_.i_a.dependants, false)) continue;
                if (auto m = mutation(v.decl)) add(Category::AL, v.name, e, *m);
            }
            for (const auto& v : s_.s_b) {
                const bool used = std::any_of(far.begin(), far.end(), [&](const auto& dc) {
                    return intersects(s_.reads(dc.second), v.dependants);
                });
                if (!used) continue;
                if (auto m = mutation(v.decl)) add(Category::ES, v.name, e, *m);
            }
            opaque_calls(e, near, senders_and_receivers);
        }
        fee_updates();
        callbacks();

        std::sort(out_.begin(), out_.end(), [](const Indicator& a, const Indicator& b) {
            return std::tie(a.category, a.identifier, a.evidence.end_node_id) <
                   std::tie(b.category, b.identifier, b.evidence.end_node_id);
        });
        out_.erase(std::unique(out_.begin(), out_.end(),
                               [](const Indicator& a, const Indicator& b) {
                                   return a.category == b.category && a.identifier == b.identifier;
                               }),
                   out_.end());
        return std::move(out_);
    }

private:
    struct Mut {
        std::string mutator;
        Via via;
    };

    const std::vector<Relation>& relations(NodeId cond) {
        auto it = rel_cache_.find(cond);
        if (it != rel_cache_.end()) return it->second;
        std::vector<Relation> rels;
        std::function<void(NodeId)> go = [&](NodeId id) {
            const Node& n = s_.ast->at(id);
            if (n.kind == NodeKind::BinaryOp && n.children.size() == 2 &&
                (is_comparison(n.name) || n.name == "[]")) {
                rels.push_back({n.name, s_.reads(n.children[0]), s_.reads(n.children[1])});
            }
            if (n.kind == NodeKind::LowLevelCall) return;
            for (NodeId c : n.children) go(c);
        };
        go(cond);
        return rel_cache_.emplace(cond, std::move(rels)).first->second;
    }

    /// Some comparison (or index, when allowed) in the conditions puts `var`
    /// on one side and `input` on the other.
    bool related(const std::vector<std::pair<int, NodeId>>& conds, const std::set<VarKey>& var,
                 const std::set<VarKey>& input, bool allow_index) {
        for (const auto& [d, cond] : conds) {
            for (const auto& r : relations(cond)) {
                if (r.op == "[]" && !allow_index) continue;
                if ((intersects(r.lhs, var) && intersects(r.rhs, input)) ||
                    (intersects(r.rhs, var) && intersects(r.lhs, input))) {
                    return true;
                }
            }
        }
        return false;
    }

    std::optional<Mut> mutation(NodeId var) const {
        auto it = s_.mutators.find(var);
        if (it == s_.mutators.end()) return std::nullopt;
        if (!it->second.backdoors.empty()) return Mut{it->second.backdoors.front(), Via::backdoor};
        if (!it->second.external_calls.empty()) {
            return Mut{std::to_string(it->second.external_calls.front()), Via::external_call};
        }
        return std::nullopt;
    }

    bool constructor_only(const StateVarInfo& v) const {
        if (v.type_tag != TypeTag::AddressList) return false;
        auto it = s_.mutators.find(v.decl);
        return it == s_.mutators.end() || !it->second.open_writes;
    }

    void add(Category c, std::string identifier, NodeId site, Mut m) {
        out_.push_back({c, std::move(identifier), {site, std::move(m.mutator), m.via}});
    }

    // Checks that hinge on a call into a contract we have no source for.
    void opaque_calls(NodeId e, const std::vector<std::pair<int, NodeId>>& near,
                      const std::set<VarKey>& senders_and_receivers) {
        for (const auto& [d, cond] : near) {
            std::function<void(NodeId)> go = [&](NodeId id) {
                const Node& n = s_.ast->at(id);
                if (n.kind == NodeKind::LowLevelCall && !s_.llc_targets.count(id)) {
                    std::set<VarKey> args;
                    for (NodeId c : n.children) {
                        const auto r = s_.reads(c);
                        args.insert(r.begin(), r.end());
                    }
                    Category cat = Category::ES;
                    if (intersects(args, s_.i_a.dependants)) {
                        cat = Category::AL;
                    } else if (intersects(args, senders_and_receivers)) {
                        cat = Category::EP;
                    }
                    add(cat, n.name, e, {std::to_string(id), Via::external_call});
                }
                for (NodeId c : n.children) go(c);
            };
            go(cond);
        }
    }

    void fee_updates() {
        std::vector<const StateVarInfo*> fee_vars;
        for (const auto& v : s_.s_i) fee_vars.push_back(&v);
        for (const auto& v : s_.s_c) fee_vars.push_back(&v);
        const auto& ast = *s_.ast;
        for (const auto& n : ast.nodes) {
            NodeId target = 0;
            NodeId rhs = 0;
            if (n.kind == NodeKind::Assignment && n.children.size() == 2) {
                const auto& lhs = ast.at(n.children[0]);
                if (lhs.kind != NodeKind::Identifier || !lhs.refs) continue;
                target = *lhs.refs;
                rhs = n.children[1];
            } else if (n.kind == NodeKind::Parameter && !n.children.empty()) {
                target = n.id;
                rhs = n.children.front();
            } else {
                continue;
            }
            auto owner = s_.callable_of(n.id);
            if (!owner || !s_.F.count(*owner)) continue;
            if (!s_.i_a.dependants.count({VarKey::Kind::Decl, target})) continue;
            const auto r = s_.reads(rhs);
            for (const auto* v : fee_vars) {
                if (!intersects(r, v->dependants)) continue;
                if (auto m = mutation(v->decl)) add(Category::FM, v->name, n.id, *m);
            }
        }
    }

    // A caller u inside a call-graph cycle whose callee v takes an input that
    // an end node compares with a managed variable.
    void callbacks() {
        const auto& ast = *s_.ast;
        std::vector<const StateVarInfo*> managed;
        for (const auto* vars : {&s_.s_a, &s_.s_i}) {
            for (const auto& v : *vars) {
                if (s_.is_mutable(v.decl)) managed.push_back(&v);
            }
        }
        if (managed.empty()) return;
        for (const auto& scc : find_cycles(s_.call_graph)) {
            const std::set<NodeId> members(scc.begin(), scc.end());
            for (const auto& [u, v] : s_.call_graph.edges) {
                if (!members.count(u) || !members.count(v)) continue;
                if (is_entry_function(ast.at(u))) continue;
                std::set<VarKey> inputs;
                for (NodeId c : ast.at(v).children) {
                    if (ast.at(c).kind != NodeKind::Parameter) continue;
                    const auto d = s_.dep({VarKey::Kind::Decl, c});
                    inputs.insert(d.begin(), d.end());
                }
                if (inputs.empty()) continue;
                for (NodeId e : s_.N) {
                    const auto near = s_.end_conditions(e, 1);
                    for (const auto* m : managed) {
                        if (!related(near, m->dependants, inputs, true)) continue;
                        add(Category::IC, ast.at(u).name, e, *mutation(m->decl));
                    }
                }
            }
        }
    }

    const SemanticSummary& s_;
    const DetectorConfig& cfg_;
    std::map<NodeId, std::vector<Relation>> rel_cache_;
    std::vector<Indicator> out_;
};

} // namespace

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view s) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (kCategoryNames[i] == s) return static_cast<Category>(i);
    }
    return std::nullopt;
}

std::string_view to_string(Via v) { return kViaNames[static_cast<std::size_t>(v)]; }

std::optional<Via> parse_via(std::string_view s) {
    for (std::size_t i = 0; i < kViaNames.size(); ++i) {
        if (kViaNames[i] == s) return static_cast<Via>(i);
    }
    return std::nullopt;
}

std::vector<Indicator> detect_indicators(const SemanticSummary& summary,
                                         const DetectorConfig& config) {
    return Detector(summary, config).run();
}

void to_json(nlohmann::json& j, const Indicator& ind) {
    j = {{"category", to_string(ind.category)},
         {"identifier", ind.identifier},
         {"evidence",
          {{"end_node_id", ind.evidence.end_node_id},
           {"mutator", ind.evidence.mutator},
           {"via", to_string(ind.evidence.via)}}}};
}

void from_json(const nlohmann::json& j, Indicator& ind) {
    const auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw Error("unknown indicator category");
    ind.category = *cat;
    ind.identifier = j.at("identifier").get<std::string>();
    const auto& ev = j.at("evidence");
    ind.evidence.end_node_id = ev.at("end_node_id").get<NodeId>();
    ind.evidence.mutator = ev.at("mutator").get<std::string>();
    const auto via = parse_via(ev.at("via").get<std::string>());
    if (!via) throw Error("unknown indicator via");
    ind.evidence.via = *via;
}

} // namespace trapdoor::semantic
