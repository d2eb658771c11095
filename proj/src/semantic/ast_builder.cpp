#include <trapdoor/semantic/ast_builder.hpp>

#include <functional>
#include <map>

namespace trapdoor::semantic {

AstBuilder::Id AstBuilder::add(NodeKind kind, std::string name, std::vector<Id> children) {
    if (contracts_.empty() && kind != NodeKind::Contract) {
        throw AstError("AstBuilder: begin_contract must come first");
    }
    Node n;
    n.id = next_id_++;
    n.kind = kind;
    n.name = std::move(name);
    n.children = std::move(children);
    nodes_.push_back(std::move(n));
    owner_.push_back(kind == NodeKind::Contract ? contracts_.size() : contracts_.size() - 1);
    return nodes_.back().id;
}

Node& AstBuilder::node(Id id) {
    const auto first = nodes_.front().id;
    return nodes_.at(static_cast<std::size_t>(id - first));
}

AstBuilder::Id AstBuilder::begin_contract(std::string name) {
    Id id = add(NodeKind::Contract, name);
    contracts_.emplace_back(std::move(name), id);
    return id;
}

AstBuilder::Id AstBuilder::state_var(std::string name, TypeTag tag, bool constant,
                                     std::optional<Id> init) {
    std::vector<Id> ch;
    if (init) ch.push_back(*init);
    Id id = add(NodeKind::StateVar, std::move(name), std::move(ch));
    node(id).type_tag = tag;
    node(id).constant = constant;
    node(id).visibility = Visibility::Private;
    node(contracts_.back().second).children.push_back(id);
    return id;
}

AstBuilder::Id AstBuilder::param(std::string name, TypeTag tag, std::optional<Id> init) {
    std::vector<Id> ch;
    if (init) ch.push_back(*init);
    Id id = add(NodeKind::Parameter, std::move(name), std::move(ch));
    node(id).type_tag = tag;
    return id;
}

AstBuilder::Id AstBuilder::function(std::string name, Visibility vis, std::vector<Id> params,
                                    std::vector<Id> modifiers, Id body) {
    std::vector<Id> ch = std::move(params);
    ch.insert(ch.end(), modifiers.begin(), modifiers.end());
    ch.push_back(body);
    Id id = add(NodeKind::Function, std::move(name), std::move(ch));
    node(id).visibility = vis;
    node(contracts_.back().second).children.push_back(id);
    return id;
}

AstBuilder::Id AstBuilder::modifier(std::string name, std::vector<Id> params, Id body) {
    std::vector<Id> ch = std::move(params);
    ch.push_back(body);
    Id id = add(NodeKind::Modifier, std::move(name), std::move(ch));
    node(contracts_.back().second).children.push_back(id);
    return id;
}

AstBuilder::Id AstBuilder::block(std::vector<Id> statements) {
    return add(NodeKind::Block, "", std::move(statements));
}

AstBuilder::Id AstBuilder::if_(Id cond, Id then_block, std::optional<Id> else_block) {
    std::vector<Id> ch{cond, then_block};
    if (else_block) ch.push_back(*else_block);
    return add(NodeKind::If, "", std::move(ch));
}

AstBuilder::Id AstBuilder::call(std::string callee, std::vector<Id> args) {
    return add(NodeKind::Call, std::move(callee), std::move(args));
}

AstBuilder::Id AstBuilder::low_level_call(std::string target, std::vector<Id> args) {
    return add(NodeKind::LowLevelCall, std::move(target), std::move(args));
}

AstBuilder::Id AstBuilder::require(Id cond, std::string message) {
    std::vector<Id> ch{cond};
    if (!message.empty()) ch.push_back(literal(std::move(message)));
    return add(NodeKind::Require, "require", std::move(ch));
}

AstBuilder::Id AstBuilder::assert_(Id cond) { return add(NodeKind::Assert, "assert", {cond}); }

AstBuilder::Id AstBuilder::revert(std::string message) {
    std::vector<Id> ch;
    if (!message.empty()) ch.push_back(literal(std::move(message)));
    return add(NodeKind::Revert, "revert", std::move(ch));
}

AstBuilder::Id AstBuilder::ret(std::optional<Id> expr) {
    std::vector<Id> ch;
    if (expr) ch.push_back(*expr);
    return add(NodeKind::Return, "return", std::move(ch));
}

AstBuilder::Id AstBuilder::assign(Id lhs, Id rhs, std::string op) {
    return add(NodeKind::Assignment, std::move(op), {lhs, rhs});
}

AstBuilder::Id AstBuilder::binop(std::string op, Id lhs, Id rhs) {
    return add(NodeKind::BinaryOp, std::move(op), {lhs, rhs});
}

AstBuilder::Id AstBuilder::unop(std::string op, Id operand) {
    return add(NodeKind::BinaryOp, std::move(op), {operand});
}

AstBuilder::Id AstBuilder::ident(std::string name) {
    return add(NodeKind::Identifier, std::move(name));
}

AstBuilder::Id AstBuilder::literal(std::string text) {
    Id id = add(NodeKind::Literal, std::move(text));
    return id;
}

AstBuilder::Id AstBuilder::msg_sender() {
    Id id = add(NodeKind::MemberAccess, "msg.sender");
    node(id).type_tag = TypeTag::Address;
    return id;
}

nlohmann::json AstBuilder::build() const {
    std::vector<Node> nodes = nodes_;
    const NodeId first = nodes.empty() ? 0 : nodes.front().id;
    auto at = [&](NodeId id) -> Node& { return nodes[static_cast<std::size_t>(id - first)]; };

    for (const auto& [cname, cid] : contracts_) {
        std::map<std::string, NodeId> state_vars;
        std::map<std::string, NodeId> callables;
        for (NodeId d : at(cid).children) {
            const auto& decl = at(d);
            if (decl.kind == NodeKind::StateVar) state_vars.emplace(decl.name, d);
            if (decl.kind == NodeKind::Function || decl.kind == NodeKind::Modifier) {
                callables.emplace(decl.name, d);
            }
        }
        std::function<void(NodeId, std::map<std::string, NodeId>&)> collect_locals =
            [&](NodeId id, std::map<std::string, NodeId>& scope) {
                const auto& n = at(id);
                if (n.kind == NodeKind::Parameter) scope.emplace(n.name, id);
                for (NodeId c : n.children) collect_locals(c, scope);
            };
        std::function<void(NodeId, const std::map<std::string, NodeId>&)> resolve =
            [&](NodeId id, const std::map<std::string, NodeId>& scope) {
                auto& n = at(id);
                if (n.kind == NodeKind::Identifier) {
                    if (auto it = scope.find(n.name); it != scope.end()) {
                        n.refs = it->second;
                    } else if (auto sv = state_vars.find(n.name); sv != state_vars.end()) {
                        n.refs = sv->second;
                    }
                } else if (n.kind == NodeKind::Call) {
                    if (auto it = callables.find(n.name); it != callables.end()) n.refs = it->second;
                }
                for (NodeId c : n.children) resolve(c, scope);
            };
        for (NodeId d : at(cid).children) {
            std::map<std::string, NodeId> scope;
            if (at(d).kind != NodeKind::StateVar) collect_locals(d, scope);
            resolve(d, scope);
        }
    }

    nlohmann::json contracts = nlohmann::json::array();
    for (std::size_t c = 0; c < contracts_.size(); ++c) {
        nlohmann::json jn = nlohmann::json::array();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (owner_[i] != c) continue;
            const auto& n = nodes[i];
            jn.push_back({{"id", n.id},
                          {"kind", to_string(n.kind)},
                          {"name", n.name},
                          {"type_tag", to_string(n.type_tag)},
                          {"constant", n.constant},
                          {"visibility", to_string(n.visibility)},
                          {"children", n.children},
                          {"refs", n.refs ? nlohmann::json(*n.refs) : nlohmann::json()}});
        }
        contracts.push_back({{"name", contracts_[c].first}, {"nodes", std::move(jn)}});
    }
    return {{"schema_version", 1}, {"contracts", std::move(contracts)}};
}

} // namespace trapdoor::semantic
